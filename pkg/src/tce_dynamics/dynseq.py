"""
The dynamical sequences (y_n, p_n, kappa_n, Upsilon_n).

With ell(y) = 2y/nu, C = 2mu/(mu + nu), D = 2mu/(mu - nu), the sequences
start from y_0 = eta*mu*nu/(mu + nu) and follow

    y_{n+1} = (1 - C p_n) y_n          if p_n < 1/C
              (1 - D (1 - p_n)) y_n    if p_n > 1/C
              0                        if p_n = 1/C

with Upsilon_{n+1} the G'' or G' value just below ell(y_{n+1}) and
p_{n+1} = Upsilon/ell or 1 - Upsilon/ell accordingly.  The run stops at
p_n = 1/C.  With rational nu, mu and exact lam, eta everything is exact.

The recursion expands relative errors by about phi**-2 per step, so a plain
double run loses ten digits by n = 25.  Float parameters are therefore read
as the exact rationals they represent and run exactly by default; pass
precision="double" for the raw floating-point recursion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .cf import GammaTable, golden_eta, golden_lambda
from .numeric import PHI, PHI_FLOAT, GoldenRational, gr_floor

__all__ = [
    "DynSeqParams",
    "DynSeq",
    "compute_dynseq",
    "regime",
    "closed_form",
    "y_next_closed",
    "chi",
    "omega",
    "golden_dynseq_params",
    "rationalized",
]

_EXACT_TYPES = (int, Fraction, GoldenRational)


@dataclass(frozen=True)
class DynSeqParams:
    nu: object
    mu: object
    lam: object
    eta: object
    k: int | None = None   # set for lam = 1/(k + phi), eta = 1 - k*lam

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError("nu must be positive")
        if not abs(self.mu) > self.nu:
            raise ValueError("need |mu| > nu")
        if not (self.lam > 0 and self.eta > 0):
            raise ValueError("lam and eta must be positive")

    @property
    def exact(self) -> bool:
        return all(isinstance(v, _EXACT_TYPES) for v in (self.nu, self.mu, self.lam, self.eta))

    def scalar(self, v):
        if not self.exact:
            return float(v)
        # int / int would fall through to float division
        return Fraction(v) if isinstance(v, int) else v

    @property
    def C(self):
        nu, mu = self.scalar(self.nu), self.scalar(self.mu)
        return 2 * mu / (mu + nu)

    @property
    def D(self):
        nu, mu = self.scalar(self.nu), self.scalar(self.mu)
        return 2 * mu / (mu - nu)

    def ell(self, y):
        return 2 * y / self.scalar(self.nu)

    @property
    def y0(self):
        nu, mu, eta = (self.scalar(v) for v in (self.nu, self.mu, self.eta))
        return eta * mu * nu / (mu + nu)

    @property
    def mu_bar(self):
        phi = PHI if self.exact else PHI_FLOAT
        return self.scalar(self.nu) / phi ** 3


def golden_dynseq_params(k: int, nu, mu) -> DynSeqParams:
    return DynSeqParams(nu, mu, golden_lambda(k), golden_eta(k), k=k)


@dataclass
class DynSeq:
    params: DynSeqParams
    y: list = field(default_factory=list)
    p: list = field(default_factory=list)
    kappa: list = field(default_factory=list)
    upsilon: list = field(default_factory=list)
    terminated: bool = False   # p_n = 1/C reached; the last entry is that n

    def side(self, n: int) -> str:
        """Boundary line reached by the return of the y_n section point: 'L1' or 'Ld'."""
        if n == 0:
            return "Ld"
        q = self.p[n - 1]
        invc = 1 / self.params.C
        if q > invc:
            return "L1"
        if q < invc:
            return "Ld"
        return "none"


def rationalized(params: DynSeqParams) -> DynSeqParams:
    """The same parameters with every float replaced by its exact value."""
    def conv(v):
        return Fraction(v) if isinstance(v, float) else v
    return DynSeqParams(conv(params.nu), conv(params.mu), conv(params.lam), conv(params.eta), params.k)


def _to_float(seq: DynSeq, params: DynSeqParams) -> DynSeq:
    return DynSeq(
        params,
        [float(v) for v in seq.y],
        [float(v) for v in seq.p],
        list(seq.kappa),
        [float(v) for v in seq.upsilon],
        seq.terminated,
    )


def compute_dynseq(params: DynSeqParams, N: int, table: GammaTable | None = None,
                   precision: str = "exact") -> DynSeq:
    """
    Terms n = 0..N (fewer if the run terminates).

    precision: "exact" runs float parameters at their exact rational values
    and returns floats; "double" runs the recursion in doubles.
    """
    if precision not in ("exact", "double"):
        raise ValueError("precision must be 'exact' or 'double'")
    if not params.exact and precision == "exact":
        exact_params = rationalized(params)
        return _to_float(compute_dynseq(exact_params, N, precision="exact"), params)
    exact = params.exact
    if table is None:
        table = GammaTable(params.lam, k=params.k, exact=exact)
    lam = params.scalar(params.lam)
    C, D = params.C, params.D
    invc = 1 / C
    out = DynSeq(params)
    y = params.y0
    ell = params.ell(y)
    kap = table.first_below("double", ell)
    ups = table.double(kap)
    p = ups / ell
    out.y.append(y)
    out.p.append(p)
    out.kappa.append(kap)
    out.upsilon.append(ups)
    for _ in range(N):
        if p == invc:
            out.terminated = True
            break
        if p < invc:
            y = (1 - C * p) * y
            ell = params.ell(y)
            kap = table.first_below("double", ell)
            ups = table.double(kap)
            p = ups / ell
        else:
            y = (1 - D * (1 - p)) * y
            ell = params.ell(y)
            kap = table.first_below("prime", ell)
            g0 = table.prime(0)
            if ell > 1:
                ups = lam * 0 + 1
            elif ell > g0:
                ups = 1 - (1 + _floor((1 - ell) / lam)) * lam
            else:
                ups = table.prime(kap)
            p = 1 - ups / ell
        out.y.append(y)
        out.p.append(p)
        out.kappa.append(kap)
        out.upsilon.append(ups)
    return out


def _floor(x) -> int:
    return gr_floor(x) if isinstance(x, GoldenRational) else math.floor(x)


def regime(params: DynSeqParams) -> str:
    """'outer' for |mu| > mu_bar, 'negative' for -mu_bar < mu < -nu, 'positive' for nu < mu < mu_bar."""
    mu = params.scalar(params.mu)
    mb = params.mu_bar
    if mu > mb or mu < -mb:
        return "outer"
    if mu == mb or mu == -mb:
        return "boundary"
    return "negative" if mu < 0 else "positive"


def closed_form(params: DynSeqParams, n: int):
    """
    (p_n, ell(y_n)) in closed form for the golden family.

    In the 'negative' regime the formula holds from n = 1; n = 0 returns the
    value the recursion gives, 1/(C phi) and C lam phi.
    """
    if params.k is None:
        raise ValueError("closed forms need the golden family (k set)")
    phi = PHI if params.exact else PHI_FLOAT
    lam = params.scalar(params.lam)
    C, D = params.C, params.D
    reg = regime(params)
    if reg == "outer":
        if n % 2 == 0:
            return 1 / (C * phi), C * lam * phi ** (n + 1)
        return 1 - 1 / (D * phi), D * lam * phi ** (n + 1)
    if reg == "negative":
        if n == 0:
            return 1 / (C * phi), C * lam * phi
        return 1 - phi / D, D * lam * phi ** (2 * n)
    if reg == "positive":
        return phi / C, C * lam * phi ** (2 * n + 1)
    raise ValueError("mu on a regime boundary")


def y_next_closed(params: DynSeqParams, y, upsilon, side: str = "L1"):
    """
    y_{n+1} from y_n and Upsilon_n without p_n.

    side 'L1' (p_{n-1} > 1/C): threshold (1/nu - 1/mu)^-1 Upsilon;
    side 'Ld' (p_{n-1} < 1/C): threshold (1/nu + 1/mu)^-1 Upsilon.
    """
    nu, mu = params.scalar(params.nu), params.scalar(params.mu)
    if side == "L1":
        t = upsilon / (1 / nu - 1 / mu)
        if y == t:
            return y * 0
        if y > t:
            return y - t
        return upsilon / (1 / nu + 1 / mu) - (mu - nu) / (mu + nu) * y
    if side == "Ld":
        t = upsilon / (1 / nu + 1 / mu)
        if y == t:
            return y * 0
        if y > t:
            return y - t
        return upsilon / (1 / nu - 1 / mu) - (mu + nu) / (mu - nu) * y
    raise ValueError("side must be 'L1' or 'Ld'")


def chi(params: DynSeqParams, p_ref, x):
    """x, 1 - x or 1 as p_ref is below, above or equal to 1/C."""
    invc = 1 / params.C
    if p_ref < invc:
        return x
    if p_ref > invc:
        return 1 - x
    return x * 0 + 1


def omega(params: DynSeqParams, p_ref):
    invc = 1 / params.C
    if p_ref < invc:
        return params.C
    if p_ref > invc:
        return params.D
    return params.C * 0 + 1
