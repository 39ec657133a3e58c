import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpuskit.core import (
    PASHTO_PROFILE,
    Document,
    ScriptProfile,
    SourceSpec,
    content_hash,
    normalize_for_hash,
    tokenize,
)


class TestTokenize:
    def test_empty(self):
        assert tokenize("") == []

    def test_two_tokens(self):
        assert tokenize("سلام نړۍ") == ["سلام", "نړۍ"]

    def test_whitespace_runs_collapse(self):
        assert tokenize("a\t b\n\n c") == ["a", "b", "c"]

    def test_unicode_whitespace_splits(self):
        # NBSP, ogham space mark, ideographic space all carry White_Space
        nbsp, ogham, ideographic = chr(0xA0), chr(0x1680), chr(0x3000)
        assert tokenize(f"a{nbsp}b{ogham}c{ideographic}d") == ["a", "b", "c", "d"]

    def test_zwnj_does_not_split(self):
        # ZWNJ lacks the White_Space property and stays inside the token
        word = "می" + chr(0x200C) + "خواهم"
        assert tokenize(word) == [word]

    def test_separator_controls_do_not_split(self):
        # U+001C..001F are isspace() in Python but not White_Space
        assert tokenize("a\x1cb") == ["a\x1cb"]

    @given(st.text())
    def test_no_whitespace_inside_tokens(self, text):
        # independent statement of the White_Space property set
        white_space = set(
            list(range(0x0009, 0x000E))
            + [0x0020, 0x0085, 0x00A0, 0x1680]
            + list(range(0x2000, 0x200B))
            + [0x2028, 0x2029, 0x202F, 0x205F, 0x3000]
        )
        for token in tokenize(text):
            assert token
            assert not any(ord(ch) in white_space for ch in token)

    @given(st.text())
    def test_join_then_tokenize_roundtrip(self, text):
        tokens = tokenize(text)
        assert tokenize(" ".join(tokens)) == tokens


class TestNormalizeForHash:
    def test_case_and_run_collapse(self):
        assert normalize_for_hash("Hello   World") == "hello world"

    def test_arabic_unaffected_by_lowercasing(self):
        assert normalize_for_hash("  سلام\n\tنړۍ ") == "سلام نړۍ"

    def test_simple_case_mapping_dotted_i(self):
        # Full-mapping would expand U+0130 into two code points
        assert normalize_for_hash("İstanbul") == "istanbul"

    def test_simple_case_mapping_no_final_sigma_context(self):
        # Per-code-point mapping: capital sigma always becomes medial sigma
        assert normalize_for_hash("Σ AΣ") == "σ aσ"

    @given(st.text())
    def test_idempotent(self, text):
        once = normalize_for_hash(text)
        assert normalize_for_hash(once) == once

    @given(st.text())
    def test_preserves_token_count(self, text):
        assert len(tokenize(normalize_for_hash(text))) == len(tokenize(text))


class TestContentHash:
    def test_known_vector(self):
        # independently confirmed with sha256sum
        assert (
            content_hash("hello world").hex()
            == "b94d27b9934d3e08a52e52d7da7dabfac484efe37a5380ee9088f7ace2efcde9"
        )

    def test_empty_vector(self):
        assert (
            content_hash("").hex()
            == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        )

    @given(st.text(), st.text())
    def test_equal_after_normalization_means_equal_hash(self, a, b):
        na, nb = normalize_for_hash(a), normalize_for_hash(b)
        if na == nb:
            assert content_hash(na) == content_hash(nb)

    def test_distinct_fixture_texts_distinct_digests(self):
        texts = {"hello world", "hello  world!", "سلام نړۍ", "پښتو ژبه", ""}
        digests = {content_hash(normalize_for_hash(t)) for t in texts}
        # "hello world" and "hello  world!" stay distinct after normalization
        assert len(digests) == len({normalize_for_hash(t) for t in texts})


class TestScriptProfile:
    def test_contains(self):
        assert PASHTO_PROFILE.contains(ord("س"))
        assert not PASHTO_PROFILE.contains(ord("a"))
        assert PASHTO_PROFILE.contains(0x0600)
        assert PASHTO_PROFILE.contains(0x06FF)
        assert not PASHTO_PROFILE.contains(0x0700)

    def test_rejects_unsorted_ranges(self):
        with pytest.raises(ValueError):
            ScriptProfile("bad", ((0x100, 0x1FF), (0x050, 0x090)))

    def test_rejects_overlapping_ranges(self):
        with pytest.raises(ValueError):
            ScriptProfile("bad", ((0x100, 0x1FF), (0x1FF, 0x2FF)))

    def test_rejects_inverted_range(self):
        with pytest.raises(ValueError):
            ScriptProfile("bad", ((0x200, 0x100),))

    def test_classify_char(self):
        assert PASHTO_PROFILE.classify_char("س") == 1
        assert PASHTO_PROFILE.classify_char("a") == 0
        assert PASHTO_PROFILE.classify_char("3") == -1
        assert PASHTO_PROFILE.classify_char("؟") == -1  # Arabic punctuation


class TestSourceSpec:
    def test_valid(self):
        spec = SourceSpec(name="azadi", category="news_radio", kind="crawl")
        assert spec.category == "news_radio"

    def test_rejects_unknown_category(self):
        with pytest.raises(ValueError, match="category"):
            SourceSpec(name="x", category="social_media", kind="dump")

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            SourceSpec(name="x", category="other", kind="stream")

    def test_rejects_bad_name(self):
        with pytest.raises(ValueError, match="name"):
            SourceSpec(name="has space", category="other", kind="dump")


class TestDocument:
    def test_optional_fields_default_none(self):
        doc = Document(id="d", source_id="s", text="t")
        assert doc.url is None and doc.title is None and doc.fetched_at is None
