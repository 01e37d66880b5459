import random

import pytest

from codetok.atoms import NormalizedSeq, deserialize

WORD_POOL = [
    "x", "i", "n", "df", "foo", "bar", "value", "range", "print", "shape",
    "getData", "snake_case", "HTTPClient", "i18n", "a1", "TOTAL",
]
PUNCT_POOL = list("()[]{}.,:;=+-*<>\"'")
SPECIAL_POOL = ["NEW_LINE", "INDENT", "DEDENT"]


def random_seq(rng: random.Random, min_atoms=1, max_atoms=12,
               specials=True) -> NormalizedSeq:
    pool = WORD_POOL + PUNCT_POOL + (SPECIAL_POOL if specials else [])
    n = rng.randint(min_atoms, max_atoms)
    return deserialize(" ".join(rng.choice(pool) for _ in range(n)))


@pytest.fixture
def rng():
    return random.Random(20240817)
