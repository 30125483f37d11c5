"""Word enumeration over matrix products, witness searches, and certificates.

Products follow the right-to-left convention: for a word w = i_1 ... i_L the
product is M_w = M_{i_L} @ ... @ M_{i_1}, so extending a word appends a new
leftmost factor. Everything verdict-relevant is exact; the only floating
point is inside candidate generation for Rayleigh witnesses, and every
candidate is re-evaluated exactly before it is believed.

The two searches and the certificate return three-valued verdicts:
Inconsistent carries a re-verified witness, Consistent carries a norm
certificate, Unknown carries the budget report. The underlying problems are
undecidable, so budgets are mandatory arguments with no defaults.

Hot-path arithmetic uses integer numerators over a common denominator per
matrix (an exact representation of the same rationals); Fractions appear at
every public boundary.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .linalg import (
    Mat,
    ONE,
    Vec,
    ZERO,
    dot,
    frac,
    frobenius_sq,
    identity,
    induced_inf,
    induced_one,
    mat,
    mat_mul,
    mat_vec,
    vec,
)
from .spectral import (
    RationalUnitVector,
    axis_rayleigh,
    best_rayleigh,
    float_matrix,
    rayleigh as exact_rayleigh,
)

Word = tuple[int, ...]

INCONSISTENT = "inconsistent"
CONSISTENT = "consistent"
UNKNOWN = "unknown"

# tried in this order: the induced norms certify stochastic families at
# block length 1, which the Frobenius norm generally cannot
CERTIFICATE_NORMS = ("induced_one", "induced_inf", "frobenius")


def format_word(w: Word) -> str:
    if not w:
        return "(empty)"
    if max(w) <= 9:
        return "".join(str(i) for i in w)
    return ".".join(str(i) for i in w)


def parse_word(s) -> Word:
    if isinstance(s, (list, tuple)):
        return tuple(int(i) for i in s)
    s = s.strip()
    if s in ("", "(empty)"):
        return ()
    if "." in s:
        return tuple(int(p) for p in s.split("."))
    return tuple(int(c) for c in s)


@dataclass(frozen=True)
class MatrixSet:
    """A finite labelled set of square rational matrices, labels 1..k."""

    matrices: tuple[Mat, ...]
    dim: Optional[int] = None

    def __post_init__(self):
        ms = tuple(mat(m) for m in self.matrices)
        object.__setattr__(self, "matrices", ms)
        if ms:
            d = len(ms[0])
            for i, m in enumerate(ms):
                if len(m) != d or any(len(row) != d for row in m):
                    raise ValueError(f"matrix {i + 1} is not {d}x{d}")
            if self.dim is not None and self.dim != d:
                raise ValueError(f"declared dim {self.dim} but matrices are {d}x{d}")
            object.__setattr__(self, "dim", d)
        elif self.dim is None:
            raise ValueError("an empty matrix set needs an explicit dim")

    @property
    def k(self) -> int:
        return len(self.matrices)

    @property
    def d(self) -> int:
        return self.dim  # type: ignore[return-value]

    def matrix(self, label: int) -> Mat:
        if not 1 <= label <= self.k:
            raise ValueError(f"label {label} outside 1..{self.k}")
        return self.matrices[label - 1]

    def is_column_stochastic(self) -> bool:
        for m in self.matrices:
            for j in range(self.d):
                col = [m[i][j] for i in range(self.d)]
                if any(x < 0 for x in col) or sum(col, ZERO) != 1:
                    return False
        return True

    def is_row_stochastic(self) -> bool:
        for m in self.matrices:
            for row in m:
                if any(x < 0 for x in row) or sum(row, ZERO) != 1:
                    return False
        return True


@dataclass(frozen=True)
class PfaInstance:
    """Matrices plus initial distribution q, final 0/1 vector, and cut point.

    Matrices are kept in the column convention (columns sum to one for
    stochastic instances) so that M @ q stays a distribution; the loader
    transposes row-convention inputs.
    """

    matrices: MatrixSet
    q: Vec
    final: tuple[int, ...]
    cut: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", vec(self.q))
        object.__setattr__(self, "final", tuple(int(x) for x in self.final))
        object.__setattr__(self, "cut", frac(self.cut))
        d = self.matrices.d
        if len(self.q) != d or len(self.final) != d:
            raise ValueError(f"q and F must have length {d}")
        if any(x < 0 for x in self.q) or sum(self.q, ZERO) != 1:
            raise ValueError("q must be a probability distribution (exact sum 1)")
        if any(x not in (0, 1) for x in self.final):
            raise ValueError("F entries must be 0 or 1")
        if not 0 < self.cut < 1:
            raise ValueError(f"cut point must lie strictly inside (0,1), got {self.cut}")

    @property
    def d(self) -> int:
        return self.matrices.d

    def final_vec(self) -> Vec:
        return vec(self.final)

    def is_stochastic(self) -> bool:
        return self.matrices.is_column_stochastic()


def product(ms: MatrixSet, w: Word) -> Mat:
    """Exact product M_w; the empty word gives the identity."""
    result = identity(ms.d)
    for label in w:
        result = mat_mul(ms.matrix(label), result)
    return result


def acceptance(pfa: PfaInstance, w: Word) -> Fraction:
    """F^T M_w q, exactly."""
    return dot(pfa.final_vec(), mat_vec(product(pfa.matrices, w), pfa.q))


@dataclass(frozen=True)
class MatrixNorms:
    """Exact norm bundle bracketing the spectral norm.

    frobenius_sq and the induced norms are upper-bound material
    (sigma^2 <= frobenius_sq, sigma <= sqrt(induced_one * induced_inf));
    rayleigh_lb is an exact lower bound from the best axis pair.
    """

    frobenius_sq: Fraction
    induced_inf: Fraction
    induced_one: Fraction
    rayleigh_lb: Fraction


def norms(m: Mat) -> MatrixNorms:
    if len(m) != len(m[0]):
        raise ValueError("norms expects a square matrix")
    ray, _, _ = axis_rayleigh(m)
    return MatrixNorms(frobenius_sq(m), induced_inf(m), induced_one(m), ray)


# --- integer fast path ------------------------------------------------------

IMat = tuple[int, tuple[int, ...]]  # (common denominator, flat row-major numerators)


def _to_imat(m: Mat) -> IMat:
    den = 1
    for row in m:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    nums = tuple(x.numerator * (den // x.denominator) for row in m for x in row)
    return den, nums


def _imat_to_mat(im: IMat, n: int) -> Mat:
    den, nums = im
    return tuple(
        tuple(Fraction(nums[i * n + j], den) for j in range(n)) for i in range(n)
    )


def _imat_mul(a: IMat, b: IMat, n: int) -> IMat:
    da, ea = a
    db, eb = b
    out = [0] * (n * n)
    for i in range(n):
        ai = ea[i * n : (i + 1) * n]
        row = out
        base = i * n
        for k in range(n):
            aik = ai[k]
            if aik:
                bk = eb[k * n : (k + 1) * n]
                for j in range(n):
                    row[base + j] += aik * bk[j]
    den = da * db
    g = den
    for x in out:
        g = math.gcd(g, x)
        if g == 1:
            break
    if g > 1:
        out = [x // g for x in out]
        den //= g
    return den, tuple(out)


def _imat_frob_sq(im: IMat) -> Fraction:
    den, nums = im
    return Fraction(sum(x * x for x in nums), den * den)


@dataclass(frozen=True)
class ProductNode:
    """One distinct product in the enumeration, with its shortest word."""

    word: Word
    matrix: Mat
    frobenius_sq: Fraction


@dataclass(frozen=True)
class BudgetReport:
    max_len: int
    budget: int
    emitted: int
    visited: int
    exhausted: bool


class ProductEnumeration:
    """Breadth-first, lexicographic, deduplicated stream of word products.

    Order: by word length, then lexicographically within a length. Exact
    duplicates of earlier products are pruned, keeping the shortest
    (earliest) witnessing word; the identity is not pre-seeded, so a word
    whose product is the identity still appears. `budget` caps the number of
    distinct nodes emitted; hitting it sets `exhausted` instead of raising.

    With threads > 1 the per-level products are computed by a thread pool in
    deterministic chunks; dedup and emission stay sequential, so the output
    sequence is identical for any thread count.
    """

    def __init__(self, ms: MatrixSet, max_len: int, budget: int, threads: int = 1):
        if max_len < 0:
            raise ValueError("max_len must be >= 0")
        if budget < 1:
            raise ValueError("budget must be >= 1")
        if threads < 1:
            raise ValueError("threads must be >= 1")
        self.ms = ms
        self.max_len = max_len
        self.budget = budget
        self.threads = threads
        self.emitted = 0
        self.visited = 0
        self.exhausted = False
        self._done = False

    def report(self) -> BudgetReport:
        return BudgetReport(self.max_len, self.budget, self.emitted, self.visited, self.exhausted)

    def __iter__(self) -> Iterator[ProductNode]:
        if self._done:
            raise RuntimeError("a ProductEnumeration is single-use")
        self._done = True
        ms = self.ms
        n = ms.d
        gens = [_to_imat(m) for m in ms.matrices]
        seen: dict[IMat, Word] = {}
        frontier: list[tuple[Word, IMat]] = []

        def extensions(level: list[tuple[Word, IMat]]) -> list[tuple[Word, IMat]]:
            pairs = [
                (word + (label,), gens[label - 1], im)
                for word, im in level
                for label in range(1, ms.k + 1)
            ]
            self.visited += len(pairs)
            if self.threads == 1 or len(pairs) < 64:
                return [(w, _imat_mul(g, im, n)) for w, g, im in pairs]
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                chunk = -(-len(pairs) // self.threads)
                products = list(
                    pool.map(
                        lambda p: _imat_mul(p[1], p[2], n),
                        pairs,
                        chunksize=chunk,
                    )
                )
            return [(w, im) for (w, _, _), im in zip(pairs, products)]

        ident: IMat = (1, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))
        level = [((), ident)]
        for _ in range(self.max_len):
            if not level:
                break
            fresh: list[tuple[Word, IMat]] = []
            for word, im in extensions(level):
                if im in seen:
                    continue
                seen[im] = word
                if self.emitted >= self.budget:
                    self.exhausted = True
                    return
                self.emitted += 1
                fresh.append((word, im))
                yield ProductNode(word, _imat_to_mat(im, n), _imat_frob_sq(im))
            level = fresh


def enumerate_products(ms: MatrixSet, max_len: int, budget: int, threads: int = 1) -> ProductEnumeration:
    return ProductEnumeration(ms, max_len, budget, threads)


# --- verdicts ----------------------------------------------------------------


@dataclass(frozen=True)
class CutpointWitness:
    word: Word
    value: Fraction
    cut: Fraction


@dataclass(frozen=True)
class NormWitness:
    word: Word
    rayleigh: Fraction
    threshold: Fraction
    left: RationalUnitVector
    right: RationalUnitVector


@dataclass(frozen=True)
class Certificate:
    """Sub-multiplicative norm certificate: every block of `block_len`
    consecutive factors has norm <= 1, so every word product has squared
    spectral norm <= lambda_sq."""

    norm: str
    block_len: int
    lambda_sq: Fraction
    dim: int


@dataclass(frozen=True)
class Verdict:
    kind: str
    witness: object = None
    certificate: Optional[Certificate] = None
    budget: Optional[BudgetReport] = None

    def __post_init__(self):
        if self.kind not in (INCONSISTENT, CONSISTENT, UNKNOWN):
            raise ValueError(f"unknown verdict kind {self.kind!r}")
        if self.kind == INCONSISTENT and self.witness is None:
            raise ValueError("inconsistent verdicts must carry a witness")
        if self.kind == CONSISTENT and self.certificate is None:
            raise ValueError("consistent verdicts must carry a certificate")

    @property
    def exit_code(self) -> int:
        return {CONSISTENT: 0, INCONSISTENT: 1, UNKNOWN: 2}[self.kind]


# --- searches ----------------------------------------------------------------


def cutpoint_witness_search(pfa: PfaInstance, max_len: int, budget: int, threads: int = 1) -> Verdict:
    """Look for a word with acceptance strictly above the cut point.

    Only the Inconsistent/Unknown halves exist here: strict emptiness has no
    finite certificate, so exhausting the budget is always reported Unknown.
    The empty word is checked first (the enumeration emits nonempty words).
    """
    lam = pfa.cut
    empty_val = acceptance(pfa, ())
    if empty_val > lam:
        return Verdict(INCONSISTENT, witness=CutpointWitness((), empty_val, lam))

    dq = 1
    for x in pfa.q:
        dq = dq * x.denominator // math.gcd(dq, x.denominator)
    q_nums = tuple(x.numerator * (dq // x.denominator) for x in pfa.q)
    f_idx = [i for i, b in enumerate(pfa.final) if b]
    n = pfa.d
    a, b = lam.numerator, lam.denominator

    enum = enumerate_products(pfa.matrices, max_len, budget, threads)
    for node in enum:
        den, nums = _to_imat(node.matrix)
        acc_num = sum(
            nums[i * n + j] * q_nums[j] for i in f_idx for j in range(n)
        )
        # acc_num/(den*dq) > a/b  <=>  b*acc_num > a*den*dq
        if b * acc_num > a * den * dq:
            value = acceptance(pfa, node.word)  # re-verified from scratch
            if value <= lam:
                raise AssertionError("witness re-verification failed")
            return Verdict(INCONSISTENT, witness=CutpointWitness(node.word, value, lam))
    return Verdict(UNKNOWN, budget=enum.report())


def unboundedness_witness_search(
    ms: MatrixSet,
    lam: Fraction,
    max_len: int,
    budget: int,
    threads: int = 1,
    precisions: Sequence[int] = (1 << 8, 1 << 16, 1 << 32),
) -> Verdict:
    """Look for a word and rational unit vectors with n'^T M_w n > lam.

    A returned witness is unconditionally sound (exact Rayleigh value at
    vectors with exact norm <= 1). Failure to find one within budget is
    Unknown: the search may miss witnesses whose optimal vectors resist
    low-precision rationalisation.
    """
    lam = frac(lam)
    if lam <= 0:
        raise ValueError("lam must be positive")
    lam_sq = lam * lam
    lam_f = float(lam)

    def verify(word: Word, left: RationalUnitVector, right: RationalUnitVector) -> Verdict:
        fresh = product(ms, word)
        value = exact_rayleigh(fresh, left, right)
        if value <= lam:
            raise AssertionError("witness re-verification failed")
        return Verdict(
            INCONSISTENT, witness=NormWitness(word, value, lam, left, right)
        )

    enum = enumerate_products(ms, max_len, budget, threads)
    for node in enum:
        if node.frobenius_sq <= lam_sq:
            continue  # sigma <= frobenius <= lam: nothing to find here
        ray, left, right = axis_rayleigh(node.matrix)
        if ray > lam:
            return verify(node.word, left, right)
        fm = float_matrix(node.matrix)
        try:
            import numpy as np

            sigma_est = float(np.linalg.norm(fm, 2))
        except Exception:
            sigma_est = float("inf")
        if sigma_est > lam_f * (1 - 1e-9):
            ray2, left2, right2 = best_rayleigh(node.matrix, precisions)
            if ray2 > lam:
                return verify(node.word, left2, right2)
    return Verdict(UNKNOWN, budget=enum.report())


def boundedness_certificate(ms: MatrixSet, t_max: int, max_products: int = 200_000) -> Verdict:
    """Try to certify that all word products stay bounded in spectral norm.

    If some exactly computable sub-multiplicative norm N and block length
    t <= t_max satisfy max_{|w|=t} N(M_w) <= 1, then chopping any word into
    length-t blocks bounds N(M_w) by the prefix maximum over |w| < t, and
    sigma <= c_N * N converts that to a spectral bound. The certificate
    carries lambda_sq = (c_N * max_prefix)^2 as an exact rational
    (c_frobenius = 1, c_induced = sqrt(d), so the square is what is exact).

    Per-length product sets are deduplicated only within a length: a long
    word whose product equals a shorter one must still count toward its own
    length's maximum.
    """
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    d = ms.d
    if ms.k == 0:
        cert = Certificate("frobenius", 1, Fraction(d), d)
        return Verdict(CONSISTENT, certificate=cert)
    gens = [_to_imat(m) for m in ms.matrices]
    ident: IMat = (1, tuple(1 if i == j else 0 for i in range(d) for j in range(d)))

    def level_norms(im: IMat) -> tuple[Fraction, Fraction, Fraction]:
        m = _imat_to_mat(im, d)
        # order matches CERTIFICATE_NORMS; the frobenius entry is squared
        return induced_one(m), induced_inf(m), frobenius_sq(m)

    prefix_max = list(level_norms(ident))  # frob_sq, inf, one over |w| < t
    level: list[IMat] = [ident]
    visited = 1
    for t in range(1, t_max + 1):
        nxt: dict[IMat, None] = {}
        for im in level:
            for g in gens:
                nxt.setdefault(_imat_mul(g, im, d), None)
        level = list(nxt)
        visited += len(level)
        if visited > max_products:
            return Verdict(
                UNKNOWN,
                budget=BudgetReport(t_max, max_products, visited, visited, True),
            )
        cur = [level_norms(im) for im in level]
        maxima = [max(c[i] for c in cur) for i in range(3)]
        for idx, name in enumerate(CERTIFICATE_NORMS):
            if maxima[idx] <= 1:
                if name == "frobenius":
                    lambda_sq = prefix_max[idx]  # already the squared norm
                else:
                    lambda_sq = d * prefix_max[idx] * prefix_max[idx]
                cert = Certificate(name, t, lambda_sq, d)
                return Verdict(CONSISTENT, certificate=cert)
        prefix_max = [max(p, m) for p, m in zip(prefix_max, maxima)]
    return Verdict(
        UNKNOWN,
        budget=BudgetReport(t_max, max_products, visited, visited, False),
    )
