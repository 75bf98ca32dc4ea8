"""Pure-Python Aberth-Ehrlich kernel.

Mirrors ``_aberth_ext.pyx`` operation for operation. It only uses ``+ - * /``
and ``abs`` on the iterates, so it also runs on :class:`mpmath.mpc` values
(that is how coefficient ranges beyond double precision are handled).
"""


def newton_ratio(coeffs, abs_coeffs, z, eps):
    """Return ``(p(z)/p'(z), small)`` where ``small`` flags a backward-stable root.

    Evaluates the reversed polynomial at ``1/z`` when ``|z| > 1`` so that
    high-degree inputs never overflow.
    """
    n = len(coeffs) - 1
    az = abs(z)
    if az <= 1:
        p = coeffs[n]
        dp = 0 * z
        s = abs_coeffs[n]
        for k in range(n - 1, -1, -1):
            dp = dp * z + p
            p = p * z + coeffs[k]
            s = s * az + abs_coeffs[k]
        if p == 0:
            return 0 * z, True
        small = abs(p) <= eps * s
        if dp == 0:
            return 0 * z, small
        return p / dp, small
    w = 1 / z
    aw = abs(w)
    q = coeffs[0]
    dq = 0 * z
    s = abs_coeffs[0]
    for k in range(1, n + 1):
        dq = dq * w + q
        q = q * w + coeffs[k]
        s = s * aw + abs_coeffs[k]
    if q == 0:
        return 0 * z, True
    small = abs(q) <= eps * s
    denom = w * (n - w * dq / q)
    if denom == 0:
        return 0 * z, small
    return 1 / denom, small


def aberth(coeffs, z, tol, max_iter, eps):
    """Iterate in place on the list ``z``.

    ``coeffs`` are ascending with a nonzero leading entry. Returns
    ``(iterations, done)`` where ``done[i]`` is the per-root stop flag.
    """
    n = len(z)
    abs_coeffs = [abs(c) for c in coeffs]
    # Error bound for Horner grows linearly with degree.
    bound = 4.0 * (n + 1) * eps
    done = [False] * n
    it = 0
    while it < max_iter and not all(done):
        it += 1
        for i in range(n):
            if done[i]:
                continue
            zi = z[i]
            ratio, small = newton_ratio(coeffs, abs_coeffs, zi, bound)
            if ratio == 0:
                done[i] = True
                continue
            acc = 0 * zi
            for j in range(n):
                if j != i:
                    diff = zi - z[j]
                    if diff != 0:
                        acc = acc + 1 / diff
            corr = ratio / (1 - ratio * acc)
            zi = zi - corr
            z[i] = zi
            if small or abs(corr) < tol * (1 + abs(zi)):
                done[i] = True
    return it, done
