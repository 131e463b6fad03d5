"""Dense linear algebra helpers and the seeded random stream.

Vectors and matrices are plain ``numpy.ndarray`` objects of dtype float64.
The random generator is SplitMix64 (Steele, Lea & Flood, 2014), used in its
counter form so that a whole block of draws can be produced with vectorised
uint64 arithmetic:

    state_k = seed + k * 0x9E3779B97F4A7C15          (mod 2**64), k = 1, 2, ...
    z = state_k
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out_k = z ^ (z >> 31)

Uniform doubles take the top 53 bits, ``(out >> 11) * 2**-53``. Normal draws
use the Box-Muller transform on consecutive pairs. The integer stream is
bit-identical on every platform; the normal stream additionally depends on
the platform's ``log``/``cos``/``sin`` which are correctly rounded on all
mainstream libm builds we are aware of.
"""

import numpy as np
import scipy.linalg

__all__ = [
    "NotPositiveDefiniteError",
    "ConvergenceError",
    "SeededRng",
    "as_vector",
    "dot",
    "norm",
    "spectral_radius_spd",
    "smallest_eigenvalue_spd",
    "solve_spd",
    "random_spd",
]

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


class NotPositiveDefiniteError(ValueError):
    """Raised when a matrix expected to be SPD fails its factorization."""


class ConvergenceError(RuntimeError):
    """Iterative method ran out of iterations.

    The best estimate found so far is kept on ``estimate``.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _MUL1
    z = (z ^ (z >> np.uint64(27))) * _MUL2
    return z ^ (z >> np.uint64(31))


class SeededRng:
    """SplitMix64 stream; see the module docstring for the exact algorithm.

    Parameters
    ----------
    seed : int
        Any integer; it is reduced modulo 2**64.
    """

    def __init__(self, seed):
        self.seed = int(seed) & _MASK64
        self._counter = 0

    def __repr__(self):
        return f"SeededRng(seed={self.seed}, counter={self._counter})"

    def next_u64(self, size):
        """Return the next ``size`` raw 64-bit outputs as a uint64 array."""
        k = np.arange(self._counter + 1, self._counter + size + 1, dtype=np.uint64)
        self._counter += size
        states = np.uint64(self.seed) + k * _GAMMA
        return _mix(states)

    def spawn(self, key):
        """Independent child stream derived from this seed and an integer key.

        Does not advance the parent stream.
        """
        base = np.array([(self.seed ^ ((int(key) * 0xD1B54A32D192ED03) & _MASK64))],
                        dtype=np.uint64)
        return SeededRng(int(_mix(base + _GAMMA)[0]))

    def uniform(self, low=0.0, high=1.0, size=None):
        """Uniform draws on ``[low, high)``; ``size`` may be an int or shape."""
        shape = () if size is None else size
        count = int(np.prod(shape, dtype=np.int64))
        bits = self.next_u64(count) >> np.uint64(11)
        u = bits.astype(np.float64) * 2.0 ** -53
        out = low + (high - low) * u
        return out.reshape(shape) if size is not None else float(out[0])

    def normal(self, size=None):
        """Standard normal draws (Box-Muller on consecutive pairs)."""
        shape = () if size is None else size
        count = int(np.prod(shape, dtype=np.int64))
        pairs = (count + 1) // 2
        bits = (self.next_u64(2 * pairs) >> np.uint64(11)).astype(np.float64)
        u1 = (bits[0::2] + 1.0) * 2.0 ** -53  # in (0, 1], keeps log finite
        u2 = bits[1::2] * 2.0 ** -53
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * np.pi * u2
        out = np.empty(2 * pairs)
        out[0::2] = radius * np.cos(angle)
        out[1::2] = radius * np.sin(angle)
        out = out[:count]
        return out.reshape(shape) if size is not None else float(out[0])


def as_vector(a, name="vector"):
    """Convert to a finite 1-D float64 array or raise ``ValueError``."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def dot(a, b):
    """Euclidean inner product of two equal-length vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(a @ b)


def norm(a):
    """Euclidean norm."""
    a = np.asarray(a, dtype=np.float64)
    return float(np.sqrt(a @ a))


def _check_square(B):
    B = np.asarray(B, dtype=np.float64)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {B.shape}")
    return B


def spectral_radius_spd(B, tol=1e-10, max_iter=1 << 20):
    """Largest eigenvalue of a symmetric positive-definite matrix.

    Power iteration started from the normalised all-ones vector. The
    iteration stops once the eigen-residual ``||B v - rho v||`` drops below
    ``tol * rho``; for a symmetric matrix this puts an eigenvalue within
    ``tol * rho`` of the Rayleigh quotient ``rho``.

    The first 64 steps are plain matrix-vector products. If they do not
    meet the tolerance, the iteration continues on ``B^(2^k)`` formed by
    repeated (normalised) squaring, so ``k`` squarings stand for ``2^k``
    power steps. ``max_iter`` caps this equivalent step count.

    Raises
    ------
    ConvergenceError
        If the step budget runs out. The last Rayleigh quotient is attached
        as ``estimate``.
    """
    B = _check_square(B)
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = B.shape[0]
    v0 = np.full(n, 1.0 / np.sqrt(n))

    def rayleigh(v):
        Bv = B @ v
        rho = float(v @ Bv)
        return rho, np.linalg.norm(Bv - rho * v) <= tol * abs(rho), Bv

    v = v0
    rho = 0.0
    for _ in range(min(64, max_iter)):
        rho, done, Bv = rayleigh(v)
        if done:
            return rho
        v = Bv / np.linalg.norm(Bv)

    P = B / np.linalg.norm(B, "fro")
    steps = 1
    while steps <= max_iter:
        P = P @ P
        P /= np.linalg.norm(P, "fro")
        steps *= 2
        Pv = P @ v0
        v = Pv / np.linalg.norm(Pv)
        rho, done, _ = rayleigh(v)
        if done:
            return rho
    raise ConvergenceError(
        f"power iteration did not converge within {max_iter} steps", estimate=rho)


def smallest_eigenvalue_spd(B, tol=1e-10, max_iter=1 << 20):
    """Smallest eigenvalue of an SPD matrix by inverse power iteration.

    Runs :func:`spectral_radius_spd` on ``B^{-1}`` (formed from one Cholesky
    factor) and inverts the result.
    """
    B = _check_square(B)
    factor = _cholesky(B)
    B_inv = scipy.linalg.cho_solve(factor, np.eye(B.shape[0]))
    B_inv = 0.5 * (B_inv + B_inv.T)
    return 1.0 / spectral_radius_spd(B_inv, tol=tol, max_iter=max_iter)


def _cholesky(A):
    try:
        return scipy.linalg.cho_factor(A, lower=True, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc


def solve_spd(A, b):
    """Solve ``A x = b`` for symmetric positive-definite ``A`` via Cholesky."""
    A = _check_square(A)
    b = as_vector(b, "b")
    if A.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {A.shape} vs {b.shape}")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise NotPositiveDefiniteError("matrix is not symmetric")
    return scipy.linalg.cho_solve(_cholesky(A), b)


def random_spd(n, rng, eig_lo=1.0, eig_hi=2.0):
    """Random symmetric positive-definite matrix ``Q diag(lam) Q^T``.

    The eigenvalues are i.i.d. uniform on ``[eig_lo, eig_hi]``; ``Q`` is the
    Q factor of a Gaussian matrix with the signs of ``diag(R)`` folded in so
    that the factorization is unique.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if not 0 < eig_lo <= eig_hi:
        raise ValueError("need 0 < eig_lo <= eig_hi")
    G = rng.normal((n, n))
    Q, R = np.linalg.qr(G)
    Q = Q * np.where(np.diag(R) < 0, -1.0, 1.0)
    lam = rng.uniform(eig_lo, eig_hi, size=n)
    B = (Q * lam) @ Q.T
    return 0.5 * (B + B.T)
