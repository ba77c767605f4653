"""Combinatorial special functions and a boson normal-ordering engine.

All combinatorics are exact Python integers / Fractions; conversion to float
is left to the witness layer (see ``utils.exact_to_float``).
"""
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
import math
import threading

import numpy as np

from .errors import InvalidArgumentError, SizeLimitError
from .utils import configInt


ANNIHILATE = 'a'
CREATE = 'ad'
LETTERS = {
    'a': ANNIHILATE,
    'ad': CREATE,
    'a†': CREATE,
    'adag': CREATE,
    'a+': CREATE,
}

# -- Stirling rows S(e, 0..e), grown on demand -- #
_STIRLING_ROWS = [(1,)]
_STIRLING_LOCK = threading.Lock()


def stirling2(e, f):
    """Stirling number of the second kind S(e, f).

    Triangular recurrence S(e,f) = f*S(e-1,f) + S(e-1,f-1) in exact integers.

    Examples:
        >>> stirling2(4, 2)
        7
        >>> stirling2(7, 3)
        301
    """
    if e < 0 or f < 0:
        raise InvalidArgumentError(f'stirling2 needs e, f >= 0 (got e={e}, f={f})')
    if f > e:
        return 0
    with _STIRLING_LOCK:
        while len(_STIRLING_ROWS) <= e:
            prev = _STIRLING_ROWS[-1]
            k = len(prev)
            row = [0] * (k + 1)
            for j in range(1, k + 1):
                row[j] = (j * prev[j] if j < k else 0) + prev[j - 1]
            _STIRLING_ROWS.append(tuple(row))
    return _STIRLING_ROWS[e][f]


def double_factorial(n):
    """n!! with (-1)!! = 0!! = 1.

    Examples:
        >>> double_factorial(5)
        15
        >>> double_factorial(8)
        384
    """
    if n < -1:
        raise InvalidArgumentError(f'double_factorial needs n >= -1 (got {n})')
    return math.prod(range(n, 0, -2))


def pochhammer_half(l):
    """(1/2)_{l/2} = (l-1)!!/2^{l/2}, the coherent-state value of <(dX)^l>.

    Returns an exact Fraction; float() it for arithmetic.
    """
    if l < 2 or l % 2:
        raise InvalidArgumentError(f'pochhammer_half needs an even l >= 2 (got {l})')
    return Fraction(double_factorial(l - 1), 2 ** (l // 2))


class NormalOrderedPolynomial(object):
    """Finite sum of c_{mn} a†^m a^n, stored as {(m, n): c_{mn}} without zero entries."""

    __slots__ = ('_terms',)

    def __init__(self, terms=None):
        terms = dict(terms or {})
        for (m, n) in terms:
            if m < 0 or n < 0:
                raise InvalidArgumentError(f'negative power in term {(m, n)}')
        self._terms = MappingProxyType({k: v for k, v in terms.items() if v != 0})

    @classmethod
    def one(cls):
        return cls({(0, 0): 1})

    @property
    def terms(self):
        return self._terms

    @property
    def degree(self):
        return max((m + n for (m, n) in self._terms), default=0)

    def __eq__(self, other):
        if not isinstance(other, NormalOrderedPolynomial):
            return NotImplemented
        return dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        body = ', '.join(f'{k}: {v!r}' for k, v in sorted(self._terms.items()))
        return f'NormalOrderedPolynomial({{{body}}})'

    def __add__(self, other):
        terms = dict(self._terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        return NormalOrderedPolynomial(terms)

    def scale(self, c):
        return NormalOrderedPolynomial({k: c * v for k, v in self._terms.items()})

    def timesAnnihilation(self):
        """P·a: a†^m a^n a = a†^m a^{n+1}"""
        return NormalOrderedPolynomial({(m, n + 1): v for (m, n), v in self._terms.items()})

    def timesCreation(self):
        """P·a†: a†^m a^n a† = a†^{m+1} a^n + n a†^m a^{n-1}"""
        terms = {}
        for (m, n), v in self._terms.items():
            terms[(m + 1, n)] = terms.get((m + 1, n), 0) + v
            if n:
                terms[(m, n - 1)] = terms.get((m, n - 1), 0) + n * v
        return NormalOrderedPolynomial(terms)

    def expect(self, moment):
        """Contract against a moment function moment(m, n) = <a†^m a^n>."""
        return sum(complex(v) * moment(m, n) for (m, n), v in sorted(self._terms.items()))

    def matrix(self, cutoff):
        """Dense matrix on the Fock space truncated at `cutoff` photons."""
        a = annihilation_matrix(cutoff)
        ad = a.conj().T
        out = np.zeros_like(a, dtype=complex)
        for (m, n), v in self._terms.items():
            out += complex(v) * np.linalg.matrix_power(ad, m) @ np.linalg.matrix_power(a, n)
        return out


def annihilation_matrix(cutoff):
    """Truncated a with <n-1|a|n> = sqrt(n), dimension cutoff+1."""
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), k=1)


def parse_word(word):
    """Accept 'a ad a' or an iterable of letters from {a, ad, a†, adag, a+}."""
    if isinstance(word, str):
        word = word.split()
    try:
        return tuple(LETTERS[letter] for letter in word)
    except KeyError as e:
        raise InvalidArgumentError(f'unknown operator letter {e.args[0]!r}') from None


def word_matrix(word, cutoff):
    """Product of truncated ladder matrices, left to right."""
    a = annihilation_matrix(cutoff)
    mats = {ANNIHILATE: a, CREATE: a.T}
    out = np.eye(cutoff + 1)
    for letter in parse_word(word):
        out = out @ mats[letter]
    return out


@lru_cache(maxsize=4096)
def _normal_order(word):
    if not word:
        return NormalOrderedPolynomial.one()
    head = _normal_order(word[:-1])
    return head.timesAnnihilation() if word[-1] == ANNIHILATE else head.timesCreation()


def normal_order(word, max_length=None):
    """Normal-ordered form of an operator word under [a, a†] = 1.

    Args:
        Required - word (str|sequence) - letters from {a, ad/a†}
        Optional - max_length (int)    - length bound (default: config word_bound)
    Returns:
        NormalOrderedPolynomial with integer coefficients

    Examples:
        >>> normal_order('a ad').terms == {(0, 0): 1, (1, 1): 1}
        True
    """
    word = parse_word(word)
    bound = configInt('word_bound', max_length)
    if len(word) > bound:
        raise SizeLimitError(f'operator word of length {len(word)} exceeds bound {bound}')
    return _normal_order(word)


@lru_cache(maxsize=None)
def sum_power_expansion(k):
    """(a + a†)^k normal ordered, integer coefficients."""
    if k == 0:
        return NormalOrderedPolynomial.one()
    prev = sum_power_expansion(k - 1)
    return prev.timesAnnihilation() + prev.timesCreation()


def quadrature_power_expansion(k, max_power=None):
    """Normal-ordered X^k with X = (a + a†)/sqrt(2).

    Args:
        Required - k (int)         - power, 0 <= k
        Optional - max_power (int) - bound (default: config quadrature_bound)
    Returns:
        NormalOrderedPolynomial with float coefficients
    """
    bound = configInt('quadrature_bound', max_power)
    if k < 0:
        raise InvalidArgumentError(f'quadrature power must be >= 0 (got {k})')
    if k > bound:
        raise SizeLimitError(f'quadrature power {k} exceeds bound {bound}')
    return sum_power_expansion(k).scale(2.0 ** (-k / 2))
