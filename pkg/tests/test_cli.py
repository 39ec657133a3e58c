import json

import pytest

from conftest import pashto_text, write_jsonl
from corpuskit.cli import main

PIPELINE_CONFIG = """
[pipeline]
output_dir = "out"

[source.alpha]
category = "news_radio"
kind = "dump"
input = "alpha.jsonl"

[source.beta]
category = "pdf_books"
kind = "dump"
input = "beta.jsonl"
"""


@pytest.fixture
def fixture_dir(tmp_path):
    (tmp_path / "corpus.toml").write_text(PIPELINE_CONFIG, encoding="utf-8")
    write_jsonl(
        tmp_path / "alpha.jsonl",
        [
            {"id": "d1", "source": "alpha", "text": "english only text with at least ten little tokens here"},
            {"id": "d2", "source": "alpha", "text": pashto_text(12)},
            {"id": "d3", "source": "alpha", "text": pashto_text(12)},
            {"id": "d4", "source": "alpha", "text": pashto_text(8)},
        ],
    )
    write_jsonl(
        tmp_path / "beta.jsonl",
        [{"id": "d5", "source": "beta", "text": "پښتو ژبه کتاب ورځ خبرونه کال کور ښار ولس حکومت وخت"}],
    )
    return tmp_path


def run_cli(*argv):
    return main(list(argv))


class TestPipelineCommand:
    def test_fixture_run(self, fixture_dir, capsys):
        code = run_cli("--config", str(fixture_dir / "corpus.toml"), "pipeline")
        out = capsys.readouterr().out
        assert code == 0
        assert "langid" in out and "dedup" in out and "min_tokens" in out
        report = json.loads((fixture_dir / "out" / "report.json").read_text(encoding="utf-8"))
        assert report["raw_docs"] == 5
        assert report["raw_docs"] == (
            report["removed_langid"]
            + report["removed_dedup"]
            + report["removed_min_tokens"]
            + report["retained_docs"]
        )
        manifest = json.loads((fixture_dir / "out" / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["categories"]["news_radio"]["sources"] == 1
        assert manifest["schema_version"] == 1

    def test_percentages_recomputed_from_counts(self, fixture_dir, capsys):
        run_cli("--config", str(fixture_dir / "corpus.toml"), "pipeline")
        out = capsys.readouterr().out
        assert "20.0%" in out  # each removal stage is 1 of 5 raw
        assert "40.0%" in out  # retained 2 of 5

    def test_dry_run_writes_report_but_no_shards(self, fixture_dir):
        code = run_cli("--config", str(fixture_dir / "corpus.toml"), "--dry-run", "pipeline")
        assert code == 0
        out_dir = fixture_dir / "out"
        assert (out_dir / "report.json").exists()
        assert not list(out_dir.glob("*.jsonl"))

    def test_missing_input_exits_2_naming_path(self, fixture_dir, capsys):
        (fixture_dir / "alpha.jsonl").unlink()
        code = run_cli("--config", str(fixture_dir / "corpus.toml"), "pipeline")
        err = capsys.readouterr().err
        assert code == 2
        assert "alpha.jsonl" in err

    def test_invalid_config_exits_2_naming_key(self, tmp_path, capsys):
        (tmp_path / "bad.toml").write_text("[pipeline]\nbogus_key = 1\n", encoding="utf-8")
        code = run_cli("--config", str(tmp_path / "bad.toml"), "pipeline")
        err = capsys.readouterr().err
        assert code == 2
        assert "bogus_key" in err

    def test_no_config_exits_2(self, capsys, monkeypatch):
        monkeypatch.delenv("CORPUSKIT_CONFIG", raising=False)
        assert run_cli("pipeline") == 2

    def test_config_from_environment(self, fixture_dir, monkeypatch):
        monkeypatch.setenv("CORPUSKIT_CONFIG", str(fixture_dir / "corpus.toml"))
        assert run_cli("pipeline") == 0

    def test_output_dir_override(self, fixture_dir):
        code = run_cli(
            "--config", str(fixture_dir / "corpus.toml"),
            "--output-dir", str(fixture_dir / "elsewhere"),
            "pipeline",
        )
        assert code == 0
        assert (fixture_dir / "elsewhere" / "report.json").exists()

    def test_non_deterministic_mode_records_timestamp(self, fixture_dir):
        assert run_cli("--config", str(fixture_dir / "corpus.toml"), "--no-deterministic", "pipeline") == 0
        manifest = json.loads((fixture_dir / "out" / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["run_timestamp"] is not None

    def test_deterministic_mode_omits_timestamp(self, fixture_dir):
        assert run_cli("--config", str(fixture_dir / "corpus.toml"), "pipeline") == 0
        manifest = json.loads((fixture_dir / "out" / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["run_timestamp"] is None


@pytest.fixture
def shards_dir(fixture_dir):
    run_cli("--config", str(fixture_dir / "corpus.toml"), "pipeline")
    return fixture_dir / "out"


class TestStatsCommand:
    def test_zipf_on_exact_power_law(self, tmp_path, capsys):
        # frequencies 1000/r^2: w0 x 1000, w1 x 250, w2 x 111, w3 x 62
        rows = []
        for rank in range(1, 5):
            count = round(1000 * rank**-2)
            rows.extend(
                {"id": f"r{rank}-{i}", "source": "s", "text": f"w{rank}"} for i in range(count)
            )
        write_jsonl(tmp_path / "corpus.jsonl", rows)
        code = run_cli("--output-dir", str(tmp_path), "stats", str(tmp_path / "corpus.jsonl"), "--zipf")
        out = capsys.readouterr().out
        assert code == 0
        assert "alpha=2.00" in out
        zipf = json.loads((tmp_path / "zipf.json").read_text(encoding="utf-8"))
        assert zipf["alpha"] == pytest.approx(2.0, abs=0.005)
        assert zipf["r_squared"] == pytest.approx(1.0, abs=1e-4)

    def test_degenerate_corpus_exits_1(self, tmp_path, capsys):
        write_jsonl(tmp_path / "one.jsonl", [{"id": "a", "source": "s", "text": "same same"}])
        code = run_cli("--output-dir", str(tmp_path), "stats", str(tmp_path / "one.jsonl"), "--zipf")
        err = capsys.readouterr().err
        assert code == 1
        assert "degenerate fit" in err

    def test_marginal_table(self, tmp_path, capsys):
        rows = [
            {"id": "1", "source": "A", "text": "x y"},
            {"id": "2", "source": "B", "text": "y z"},
            {"id": "3", "source": "C", "text": "z"},
        ]
        write_jsonl(tmp_path / "c.jsonl", rows)
        code = run_cli("--output-dir", str(tmp_path), "stats", str(tmp_path / "c.jsonl"), "--marginal")
        out = capsys.readouterr().out
        assert code == 0
        table = (tmp_path / "marginal.tsv").read_text(encoding="utf-8").splitlines()
        assert table[0] == "source\tdocs\tmarginal_vocab\tpct_of_vocab"
        counts = {line.split("\t")[0]: int(line.split("\t")[2]) for line in table[1:]}
        assert counts == {"A": 1, "B": 0, "C": 0}

    def test_growth_curve_monotone(self, shards_dir, tmp_path):
        shards = sorted(str(p) for p in shards_dir.glob("*.jsonl"))
        code = run_cli("--output-dir", str(tmp_path), "stats", *shards, "--growth")
        assert code == 0
        lines = (tmp_path / "growth.tsv").read_text(encoding="utf-8").splitlines()[1:]
        values = [int(line.split("\t")[2]) for line in lines]
        assert values == sorted(values)
        assert values

    def test_save_and_load_index(self, shards_dir, tmp_path, capsys):
        shards = sorted(str(p) for p in shards_dir.glob("*.jsonl"))
        assert run_cli("--output-dir", str(tmp_path), "stats", *shards, "--save-index", str(tmp_path / "idx")) == 0
        capsys.readouterr()
        assert run_cli("--output-dir", str(tmp_path), "stats", "--index", str(tmp_path / "idx")) == 0
        out = capsys.readouterr().out
        assert "types=" in out

    def test_no_input_exits_2(self, capsys):
        assert run_cli("stats", "--zipf") == 2


class TestAblateCommand:
    @pytest.fixture
    def ablate_inputs(self, tmp_path):
        write_jsonl(
            tmp_path / "c.jsonl",
            [
                {"id": "1", "source": "A", "text": "x y"},
                {"id": "2", "source": "B", "text": "y z"},
                {"id": "3", "source": "C", "text": "q"},
            ],
        )
        (tmp_path / "groups.tsv").write_text("g1\tA\ng1\tB\ng2\tC\n", encoding="utf-8")
        (tmp_path / "tokens.tsv").write_text("T\tx\nT\tq\nT\tmissing\n", encoding="utf-8")
        return tmp_path

    def test_ablation_report(self, ablate_inputs, capsys):
        code = run_cli(
            "--output-dir", str(ablate_inputs),
            "ablate", str(ablate_inputs / "c.jsonl"),
            "--groups", str(ablate_inputs / "groups.tsv"),
            "--tokens", str(ablate_inputs / "tokens.tsv"),
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "full_corpus" in out
        data = json.loads((ablate_inputs / "ablation.json").read_text(encoding="utf-8"))
        rows = {r["group"]: r for r in data["rows"]}
        assert rows["g1"]["vocab_remaining"] == 1  # only C's {q} remains
        assert rows["g2"]["vocab_remaining"] == 3

    def test_single_group_with_all_sources(self, ablate_inputs, capsys):
        (ablate_inputs / "groups.tsv").write_text("all\tA\nall\tB\nall\tC\n", encoding="utf-8")
        code = run_cli(
            "--output-dir", str(ablate_inputs),
            "ablate", str(ablate_inputs / "c.jsonl"),
            "--groups", str(ablate_inputs / "groups.tsv"),
            "--tokens", str(ablate_inputs / "tokens.tsv"),
        )
        assert code == 0
        data = json.loads((ablate_inputs / "ablation.json").read_text(encoding="utf-8"))
        rows = {r["group"]: r for r in data["rows"]}
        assert rows["all"]["vocab_remaining"] == 0
        assert rows["all"]["vocab_lost_fraction"] == 1.0

    def test_overlapping_groups_exit_2(self, ablate_inputs, capsys):
        (ablate_inputs / "groups.tsv").write_text("g1\tA\ng2\tA\ng2\tB\ng1\tC\n", encoding="utf-8")
        code = run_cli(
            "ablate", str(ablate_inputs / "c.jsonl"),
            "--groups", str(ablate_inputs / "groups.tsv"),
            "--tokens", str(ablate_inputs / "tokens.tsv"),
        )
        err = capsys.readouterr().err
        assert code == 2
        assert "appears in groups" in err


class TestCoverageCommand:
    def test_rounding_to_one_decimal(self, tmp_path, capsys):
        write_jsonl(tmp_path / "c.jsonl", [{"id": "1", "source": "A", "text": "a b c"}])
        (tmp_path / "tokens.tsv").write_text("T\ta\nT\tb\nT\tc\nT\td\n", encoding="utf-8")
        code = run_cli(
            "--output-dir", str(tmp_path),
            "coverage", str(tmp_path / "c.jsonl"), "--tokens", str(tmp_path / "tokens.tsv"),
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "75.0%" in out

    def test_missing_tokens_file_exit_2(self, tmp_path, capsys):
        write_jsonl(tmp_path / "c.jsonl", [{"id": "1", "source": "A", "text": "a"}])
        code = run_cli("coverage", str(tmp_path / "c.jsonl"), "--tokens", str(tmp_path / "nope.tsv"))
        assert code == 2
        assert "nope.tsv" in capsys.readouterr().err


class TestCrawlCommand:
    CRAWL_CONFIG = """
[source.fix]
category = "afghan_news"
kind = "crawl"
input = "raw/fix.jsonl"
start_urls = ["https://site.test/pa/"]
allow_patterns = ["/pa/"]
url_must_contain = "/pa/"
content_selector = "article p::text"
obey_robots = false
"""

    FIXTURE_PAGES = {
        "https://site.test/pa/": (
            "<article><p>کور پاڼه ده چې خبرونه لري دلته</p></article>"
            '<a href="/pa/archive/1">a</a>'
        ),
        "https://site.test/pa/archive/1": (
            "<article><p>لومړۍ پاڼه ده چې متن لري اوس</p></article>"
            '<a href="/pa/archive/2">b</a>'
        ),
        "https://site.test/pa/archive/2": "<article><p>دوهمه پاڼه ده چې متن لري هم</p></article>",
    }

    def patch_fetcher(self, monkeypatch):
        from corpuskit.harvest import FetchResponse

        def canned_factory(user_agent=None, timeout_s=None):
            def fetch(url):
                body = self.FIXTURE_PAGES.get(url)
                if body is None:
                    return FetchResponse(404, "text/html", "")
                return FetchResponse(200, "text/html", body)

            return fetch

        monkeypatch.setattr("corpuskit.cli.urllib_fetcher", canned_factory)

    def test_fixture_crawl_writes_records(self, tmp_path, capsys, monkeypatch):
        self.patch_fetcher(monkeypatch)
        (tmp_path / "c.toml").write_text(self.CRAWL_CONFIG, encoding="utf-8")
        code = run_cli("--config", str(tmp_path / "c.toml"), "crawl", "--source", "fix")
        out = capsys.readouterr().out
        assert code == 0
        assert "pages_fetched=3 docs_emitted=3 errors=0" in out
        from corpuskit.records import read_documents

        docs = list(read_documents(tmp_path / "raw" / "fix.jsonl"))
        assert len(docs) == 3
        assert all(doc.source_id == "fix" for doc in docs)
        assert all(doc.fetched_at is None for doc in docs)  # deterministic default

    def test_max_pages_override(self, tmp_path, capsys, monkeypatch):
        self.patch_fetcher(monkeypatch)
        (tmp_path / "c.toml").write_text(self.CRAWL_CONFIG, encoding="utf-8")
        code = run_cli("--config", str(tmp_path / "c.toml"), "crawl", "--source", "fix", "--max-pages", "1")
        out = capsys.readouterr().out
        assert code == 0
        assert "pages_fetched=1" in out

    def test_unknown_source_exits_2(self, fixture_dir, capsys):
        code = run_cli("--config", str(fixture_dir / "corpus.toml"), "crawl", "--source", "ghost")
        err = capsys.readouterr().err
        assert code == 2
        assert "ghost" in err

    def test_unreachable_host_is_nonfatal(self, tmp_path, capsys):
        body = """
[source.dead]
category = "other"
kind = "crawl"
input = "dead.jsonl"
start_urls = ["http://127.0.0.1:1/pa/"]
content_selector = "p::text"
obey_robots = false
"""
        (tmp_path / "c.toml").write_text(body, encoding="utf-8")
        code = run_cli("--config", str(tmp_path / "c.toml"), "crawl", "--source", "dead")
        out = capsys.readouterr().out
        assert code == 0
        assert "errors=1" in out
        assert (tmp_path / "dead.jsonl").exists()


class TestCliContract:
    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            run_cli("--version")
        assert excinfo.value.code == 0

    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as excinfo:
            run_cli("frobnicate")
        assert excinfo.value.code == 2

    def test_idempotent_pipeline_runs(self, fixture_dir):
        config = str(fixture_dir / "corpus.toml")
        assert run_cli("--config", config, "pipeline") == 0
        first = (fixture_dir / "out" / "report.json").read_bytes()
        shards_first = {p.name: p.read_bytes() for p in (fixture_dir / "out").glob("*.jsonl")}
        assert run_cli("--config", config, "pipeline") == 0
        assert (fixture_dir / "out" / "report.json").read_bytes() == first
        shards_second = {p.name: p.read_bytes() for p in (fixture_dir / "out").glob("*.jsonl")}
        assert shards_first == shards_second
