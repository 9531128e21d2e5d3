def d(*labels):
    """0-based indices from 1-based divisor labels."""
    return tuple(i - 1 for i in labels)


def vec(n, **coeffs):
    """Relation vector from keyword coefficients: vec(8, D1=1, D3=-1)."""
    out = [0] * n
    for k, c in coeffs.items():
        out[int(k[1:]) - 1] = c
    return tuple(out)
