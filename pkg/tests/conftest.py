import pytest

from radlabel import kernels
from radlabel.ingest import make_document, tokenize
from radlabel.observations import BY_SLUG
from radlabel.rules import PhrasePattern, compile_ruleset, demo_rules_root, load_ruleset


def build_ruleset(phrases, rules=()):
    """Assemble a RuleSet from {slug: [phrase, ...]} plus rule objects."""
    patterns = []
    for slug, texts in phrases.items():
        observation = BY_SLUG[slug]
        for text in texts:
            patterns.append(PhrasePattern(observation, tuple(tokenize(text.casefold()))))
    return compile_ruleset(patterns, rules)


def first_sentence(text):
    return make_document("r", text).sentences[0]


@pytest.fixture(scope="session")
def demo_ruleset():
    root = demo_rules_root()
    return load_ruleset(root / "phrases", root / "rules")


def _kernel_impls():
    from radlabel.kernels import _pure

    impls = [_pure]
    try:
        from radlabel.kernels import _speedups

        impls.append(_speedups)
    except ImportError:
        pass
    return impls


@pytest.fixture(params=_kernel_impls(), ids=lambda m: m.IMPLEMENTATION)
def kernel_impl(request, monkeypatch):
    """Run the decorated test under each available matching kernel."""
    impl = request.param
    monkeypatch.setattr(kernels, "phrase_scan", impl.phrase_scan)
    monkeypatch.setattr(kernels, "pattern_match", impl.pattern_match)
    return impl
