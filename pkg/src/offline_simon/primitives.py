"""Toy keyed primitives: random permutations, block cipher families, and the
constructions the attacks target (Even-Mansour, FX, iterated FX, a two-block
Chaskey-style MAC, a Beetle-style sponge init, related-key oracles).

Everything is table-based and seeded. Block and key widths are desk-scale
(full tables are materialized up to 12-bit keys; larger key spaces use a
seeded on-demand variant that derives each key's permutation lazily).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .gf2 import MAX_WIDTH, BitWord

FULL_TABLE_KEY_LIMIT = 12


def _check_width(n: int, what: str = "width") -> None:
    if not 1 <= n <= MAX_WIDTH:
        raise ValueError(f"{what} must be in [1, {MAX_WIDTH}], got {n}")


@dataclass
class Permutation:
    """A bijection on {0,1}^n stored as a lookup table."""

    n: int
    table: np.ndarray
    _inverse: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        _check_width(self.n)
        self.table = np.asarray(self.table, dtype=np.int64)
        if self.table.shape != (1 << self.n,):
            raise ValueError(f"table must have 2^{self.n} entries")
        if not np.array_equal(np.sort(self.table), np.arange(1 << self.n)):
            raise ValueError("table is not a bijection")

    def __call__(self, x: int) -> int:
        return int(self.table[x])

    def inverse(self, y: int) -> int:
        if self._inverse is None:
            inv = np.empty_like(self.table)
            inv[self.table] = np.arange(1 << self.n)
            self._inverse = inv
        return int(self._inverse[y])


def random_permutation(n: int, rng: np.random.Generator) -> Permutation:
    """Uniform random permutation of {0,1}^n (Fisher-Yates, seeded)."""
    _check_width(n)
    return Permutation(n, rng.permutation(1 << n))


class BlockCipherFamily:
    """A family of independent random permutations indexed by an m-bit key.

    For key widths up to FULL_TABLE_KEY_LIMIT the whole (2^m, 2^n) table is
    materialized; beyond that, per-key permutations are derived lazily from
    the seed so memory stays bounded. Both variants are deterministic in
    (seed, m, n).
    """

    def __init__(self, m: int, n: int, seed: int):
        _check_width(m, "key width")
        _check_width(n, "block width")
        self.m = m
        self.n = n
        self.seed = seed
        self._cache: dict[int, np.ndarray] = {}
        self._full: np.ndarray | None = None
        if m <= FULL_TABLE_KEY_LIMIT:
            rng = np.random.default_rng(np.random.SeedSequence([seed, m, n]))
            self._full = np.stack(
                [rng.permutation(1 << n) for _ in range(1 << m)]
            ).astype(np.int64)

    def key_table(self, key: int) -> np.ndarray:
        """The full codebook of E_key as an array of 2^n ints."""
        if not 0 <= key < (1 << self.m):
            raise ValueError("key out of range")
        if self._full is not None:
            return self._full[key]
        if key not in self._cache:
            rng = np.random.default_rng(
                np.random.SeedSequence([self.seed, self.m, self.n, key])
            )
            self._cache[key] = rng.permutation(1 << self.n).astype(np.int64)
        return self._cache[key]

    def encrypt(self, key: int, x: int) -> int:
        return int(self.key_table(key)[x])

    def decrypt(self, key: int, y: int) -> int:
        table = self.key_table(key)
        return int(np.nonzero(table == y)[0][0])


def random_cipher_family(m: int, n: int, rng: np.random.Generator) -> BlockCipherFamily:
    """Seeded cipher family; the seed is drawn once from rng."""
    return BlockCipherFamily(m, n, int(rng.integers(0, 2**63 - 1)))


@dataclass
class EvenMansourInstance:
    """E(x) = P(x ^ k1) ^ k2 with a public permutation P."""

    n: int
    perm: Permutation
    k1: int
    k2: int


def em_encrypt(inst: EvenMansourInstance, x: int) -> int:
    return inst.perm(x ^ inst.k1) ^ inst.k2


@dataclass
class FxInstance:
    """FX(x) = E_k(x ^ k_in) ^ k_out over a cipher family E."""

    n: int
    m: int
    family: BlockCipherFamily
    k: int
    k_in: int
    k_out: int


def fx_encrypt(inst: FxInstance, x: int) -> int:
    return inst.family.encrypt(inst.k, x ^ inst.k_in) ^ inst.k_out


@dataclass
class IterFxInstance:
    """Iterated FX: rounds of x -> E_{k2}(x ^ k1), then a final ^ k1."""

    n: int
    m: int
    family: BlockCipherFamily
    k1: int
    k2: int
    rounds: int


def ifx_encrypt(inst: IterFxInstance, x: int) -> int:
    for _ in range(inst.rounds):
        x = inst.family.encrypt(inst.k2, x ^ inst.k1)
    return x ^ inst.k1


@dataclass
class ChaskeyToyInstance:
    """Two-block Chaskey-style MAC over a public permutation pi.

    tag(m1, m2) = pi(pi(k ^ m1) ^ m2 ^ k1) ^ k1. The tag is emitted at full
    state width (no truncation).
    """

    n: int
    perm: Permutation
    k: int
    k1: int


def chaskey_tag(inst: ChaskeyToyInstance, m1: int, m2: int) -> int:
    state = inst.perm(inst.k ^ m1)
    return inst.perm(state ^ m2 ^ inst.k1) ^ inst.k1


@dataclass
class BeetleToyInstance:
    """Sponge initialization: state (K1 ^ N) || K2 through a public f.

    rate/capacity split the (rate+capacity)-bit state; the nonce sits in the
    rate part. The toy observable is the full post-permutation state.
    """

    rate: int
    capacity: int
    perm: Permutation
    k1: int
    k2: int


def beetle_init(inst: BeetleToyInstance, nonce: int) -> BitWord:
    if not 0 <= nonce < (1 << inst.rate):
        raise ValueError("nonce wider than the rate")
    state = ((inst.k1 ^ nonce) << inst.capacity) | inst.k2
    return BitWord(inst.perm(state), inst.rate + inst.capacity)


@dataclass
class RelatedKeyOracle:
    """Encrypts a fixed message under k ^ delta for attacker-chosen delta."""

    family: BlockCipherFamily
    k: int
    msg: int


def related_key_query(oracle: RelatedKeyOracle, delta: int) -> int:
    return oracle.family.encrypt(oracle.k ^ delta, oracle.msg)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def save_permutation(path: str | Path, perm: Permutation) -> None:
    """Write 'n=<width>' then the table as whitespace-separated hex."""
    lines = [f"n={perm.n}"]
    lines.append(" ".join(f"{int(v):x}" for v in perm.table))
    Path(path).write_text("\n".join(lines) + "\n")


def load_permutation(path: str | Path) -> Permutation:
    n, _, values = _load_table_file(path, expect_l=False)
    return Permutation(n, np.array(values, dtype=np.int64))


def save_function_table(path: str | Path, n: int, l: int, table) -> None:
    """Codebook of an n-bit to l-bit function: permutation format plus 'l='."""
    table = np.asarray(table, dtype=np.int64)
    if table.shape != (1 << n,):
        raise ValueError(f"table must have 2^{n} entries")
    if table.min() < 0 or table.max() >= (1 << l):
        raise ValueError("table values exceed the output width")
    lines = [f"n={n}", f"l={l}", " ".join(f"{int(v):x}" for v in table)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_function_table(path: str | Path) -> tuple[int, int, np.ndarray]:
    n, l, values = _load_table_file(path, expect_l=True)
    return n, l, np.array(values, dtype=np.int64)


def _load_table_file(path: str | Path, expect_l: bool) -> tuple[int, int | None, list[int]]:
    tokens = Path(path).read_text().split()
    if not tokens or not tokens[0].startswith("n="):
        raise ValueError(f"{path}: expected 'n=<width>' header")
    n = int(tokens[0][2:])
    _check_width(n)
    rest = tokens[1:]
    l = None
    if expect_l:
        if not rest or not rest[0].startswith("l="):
            raise ValueError(f"{path}: expected 'l=<width>' header")
        l = int(rest[0][2:])
        _check_width(l, "output width")
        rest = rest[1:]
    values = [int(t, 16) for t in rest]
    if len(values) != 1 << n:
        raise ValueError(f"{path}: expected {1 << n} values, got {len(values)}")
    limit = 1 << (l if l is not None else n)
    if any(not 0 <= v < limit for v in values):
        raise ValueError(f"{path}: value out of range")
    return n, l, values


# ---------------------------------------------------------------------------
# JSON instance descriptors
# ---------------------------------------------------------------------------

_KINDS = {
    "even-mansour": EvenMansourInstance,
    "fx": FxInstance,
    "iterated-fx": IterFxInstance,
    "chaskey-toy": ChaskeyToyInstance,
    "beetle-toy": BeetleToyInstance,
    "related-key": RelatedKeyOracle,
}


def _hex(v: int) -> str:
    return f"0x{v:x}"


def instance_to_json(kind: str, seed: int, inst) -> str:
    """Descriptor carrying kind, widths, the seed, and keys in hex.

    Tables regenerate from the seed, so descriptors stay small.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown instance kind {kind!r}")
    doc: dict = {"kind": kind, "seed": seed}
    if kind == "even-mansour":
        doc["n"] = inst.n
        doc["keys"] = {"k1": _hex(inst.k1), "k2": _hex(inst.k2)}
    elif kind == "fx":
        doc["n"], doc["m"] = inst.n, inst.m
        doc["keys"] = {"k": _hex(inst.k), "k_in": _hex(inst.k_in), "k_out": _hex(inst.k_out)}
    elif kind == "iterated-fx":
        doc["n"], doc["m"], doc["rounds"] = inst.n, inst.m, inst.rounds
        doc["keys"] = {"k1": _hex(inst.k1), "k2": _hex(inst.k2)}
    elif kind == "chaskey-toy":
        doc["n"] = inst.n
        doc["keys"] = {"k": _hex(inst.k), "k1": _hex(inst.k1)}
    elif kind == "beetle-toy":
        doc["rate"], doc["capacity"] = inst.rate, inst.capacity
        doc["keys"] = {"k1": _hex(inst.k1), "k2": _hex(inst.k2)}
    elif kind == "related-key":
        doc["n"] = inst.family.n
        doc["m"] = inst.family.m
        doc["keys"] = {"k": _hex(inst.k), "msg": _hex(inst.msg)}
    return json.dumps(doc, sort_keys=True)


def instance_from_json(text: str):
    """Rebuild an instance from its descriptor (deterministic in the seed)."""
    doc = json.loads(text)
    kind = doc["kind"]
    seed = doc["seed"]
    keys = {name: int(v, 16) for name, v in doc.get("keys", {}).items()}
    rng = np.random.default_rng(seed)
    if kind == "even-mansour":
        return EvenMansourInstance(doc["n"], random_permutation(doc["n"], rng), keys["k1"], keys["k2"])
    if kind == "fx":
        fam = random_cipher_family(doc["m"], doc["n"], rng)
        return FxInstance(doc["n"], doc["m"], fam, keys["k"], keys["k_in"], keys["k_out"])
    if kind == "iterated-fx":
        fam = random_cipher_family(doc["m"], doc["n"], rng)
        return IterFxInstance(doc["n"], doc["m"], fam, keys["k1"], keys["k2"], doc["rounds"])
    if kind == "chaskey-toy":
        return ChaskeyToyInstance(doc["n"], random_permutation(doc["n"], rng), keys["k"], keys["k1"])
    if kind == "beetle-toy":
        width = doc["rate"] + doc["capacity"]
        return BeetleToyInstance(doc["rate"], doc["capacity"], random_permutation(width, rng), keys["k1"], keys["k2"])
    if kind == "related-key":
        fam = random_cipher_family(doc["m"], doc["n"], rng)
        return RelatedKeyOracle(fam, keys["k"], keys["msg"])
    raise ValueError(f"unknown instance kind {kind!r}")
