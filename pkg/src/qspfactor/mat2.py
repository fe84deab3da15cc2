"""Minimal 2x2 complex matrices over mpmath numbers.

The peeling loop multiplies tens of thousands of these, so the
representation is a flat 4-tuple with hand-written arithmetic rather
than object arrays.
"""

from __future__ import annotations

import mpmath as mp


class Mat2:
    __slots__ = ("a", "b", "c", "d")  # rows: (a b) / (c d)

    def __init__(self, a, b, c, d):
        self.a = mp.mpc(a)
        self.b = mp.mpc(b)
        self.c = mp.mpc(c)
        self.d = mp.mpc(d)

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1, 0, 0, 1)

    @classmethod
    def zero(cls) -> "Mat2":
        return cls(0, 0, 0, 0)

    @classmethod
    def from_quaternion(cls, s, x, y, z) -> "Mat2":
        """s*I + x*iX + y*iY + z*iZ for real components (s,x,y,z)."""
        i = mp.mpc(0, 1)
        return cls(s + i * z, i * x + y, i * x - y, s - i * z)

    @classmethod
    def bloch_projector(cls, px, py, pz) -> "Mat2":
        """(I + px X + py Y + pz Z) / 2."""
        half = mp.mpf(1) / 2
        return cls(
            half * (1 + pz),
            half * (px - mp.mpc(0, 1) * py),
            half * (px + mp.mpc(0, 1) * py),
            half * (1 - pz),
        )

    def __add__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    def __sub__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def scale(self, s) -> "Mat2":
        return Mat2(self.a * s, self.b * s, self.c * s, self.d * s)

    def dagger(self) -> "Mat2":
        return Mat2(mp.conj(self.a), mp.conj(self.c), mp.conj(self.b), mp.conj(self.d))

    def trace(self):
        return self.a + self.d

    def det(self):
        return self.a * self.d - self.b * self.c

    def frobenius_sq(self):
        return (abs(self.a) ** 2 + abs(self.b) ** 2 + abs(self.c) ** 2 + abs(self.d) ** 2)

    def opnorm(self):
        """Largest singular value, from the eigenvalues of M^dagger M."""
        t = self.frobenius_sq()
        g = abs(self.det()) ** 2
        disc = t * t - 4 * g
        if disc < 0:
            disc = mp.mpf(0)
        return mp.sqrt((t + mp.sqrt(disc)) / 2)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def quaternion_parts(self):
        """Real components (s,x,y,z) with M ~ s*I + x*iX + y*iY + z*iZ.

        Exact only when M actually has that form; residual imaginary
        parts are discarded.
        """
        s = (self.a + self.d) / 2
        z = (self.a - self.d) / (2 * mp.mpc(0, 1))
        x = (self.b + self.c) / (2 * mp.mpc(0, 1))
        y = (self.b - self.c) / 2
        return (s.real, x.real, y.real, z.real)

    def bloch_parts(self):
        """(px, py, pz) for a Hermitian matrix (I + p.sigma)/2 scaled by trace."""
        px = (self.b + self.c).real
        py = (self.c - self.b).imag
        pz = (self.a - self.d).real
        return (px, py, pz)

    def distance(self, o: "Mat2"):
        return (self - o).opnorm()

    def __repr__(self) -> str:
        return f"Mat2([[{self.a}, {self.b}], [{self.c}, {self.d}]])"
