"""Global field-multiplication counter and optional runtime self-checks.

The counter tracks the number of multiplications in K performed by the
algorithms.  Vectorized kernels add their totals in bulk; limb splitting
and other int64 overflow tricks are representation details and are not
double-counted.  Inversions count the square-and-multiply cost of
Fermat exponentiation.
"""


class MulCounter:
    __slots__ = ("value",)

    def __init__(self):
        self.value = 0

    def add(self, n):
        self.value += n

    def reset(self):
        self.value = 0


mul_counter = MulCounter()

# Cost charged for one inversion a^(p-2) mod p; set per field at first use.
_inv_cost_cache = {}


def inv_cost(p):
    c = _inv_cost_cache.get(p)
    if c is None:
        e = p - 2
        c = (e.bit_length() - 1) + bin(e).count("1") - 1
        _inv_cost_cache[p] = c
    return c


# When true, algorithms verify internal contracts by exact substitution
# (residuals, Sylvester solutions, divide-and-conquer coefficient
# vanishing).  Costs extra work; enabled by the test suite.
_runtime_checks = False


def set_runtime_checks(flag):
    global _runtime_checks
    _runtime_checks = bool(flag)


def checks_enabled():
    return _runtime_checks
