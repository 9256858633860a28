"""Reference values for the ten deformation coefficients of a k = 1 family.

Expands d = (1/z) c r^T symbolically in (w1, w2, z) with sympy and records the
coefficient of each basis function.  Run from the repository root:

    python3 tools/oracles/coeff_oracle.py > tests/data/coeff_oracle.json
"""
import json

import sympy as sp

w1, w2, z, t = sp.symbols("w1 w2 z t")
BASIS = [w1**2 / z, w1 * w2 / z, w2**2 / z, w1 / z, w1, w2 / z, w2, 1 / z, sp.Integer(1), z]
NAMES = ["cA", "cB", "cC", "cD", "cE", "cF", "cG", "cH", "cI", "cJ"]

CASES = [
    # lam, alpha, beta, dlam, dalpha, dbeta
    (1.0, 0, 0, 0.5, 0, 0),
    (1.0, 0, 0, 0, 1, 0),
    (1.3, 0.2 - 0.4j, 1 + 0.5j, -0.3, 0.1 + 0.2j, -0.7 + 0.05j),
    (0.8, -1 + 1j, 0.3j, 0.25, -0.5j, 0.4),
]


def cnum(c):
    return sp.Float(c.real, 30) + sp.I * sp.Float(c.imag, 30)


def coefficients(lam0, a0, b0, dl, da, db):
    a0, b0, da, db = (complex(v) for v in (a0, b0, da, db))
    lam = lam0 + dl * t
    al = cnum(a0) + cnum(da) * t
    be = cnum(b0) + cnum(db) * t
    alc = sp.conjugate(cnum(a0)) + sp.conjugate(cnum(da)) * t
    bec = sp.conjugate(cnum(b0)) + sp.conjugate(cnum(db)) * t
    A3 = al - z * bec - w1
    A4 = be + z * alc - w2
    col = [sp.diff(A4 / lam, t), -sp.diff(A3 / lam, t)]
    row = [A3 / lam, A4 / lam]
    monos = [sp.Poly(sp.expand(f * z), w1, w2, z).monoms()[0] for f in BASIS]
    out = {name: [[None, None], [None, None]] for name in NAMES}
    for i in range(2):
        for j in range(2):
            e = sp.expand((col[i] * row[j] / z).subs(t, 0))
            poly = sp.Poly(sp.expand(e * z), w1, w2, z)
            coeffs = [poly.coeff_monomial(m) for m in monos]
            # nothing may fall outside the ten-function basis
            assert sp.expand(e - sum(c * f for c, f in zip(coeffs, BASIS))) == 0
            for name, c in zip(NAMES, coeffs):
                c = complex(sp.N(c, 20))
                out[name][i][j] = [c.real, c.imag]
    return out


cases = []
for lam0, a0, b0, dl, da, db in CASES:
    cases.append({
        "lambda": lam0,
        "alpha": [complex(a0).real, complex(a0).imag],
        "beta": [complex(b0).real, complex(b0).imag],
        "dlam": dl,
        "dalpha": [complex(da).real, complex(da).imag],
        "dbeta": [complex(db).real, complex(db).imag],
        "coeffs": coefficients(lam0, a0, b0, dl, da, db),
    })
print(json.dumps({"cases": cases}, indent=1))
