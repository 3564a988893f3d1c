"""Scalar GRU steps at 40 significant digits."""

from mpmath import mp, mpf, exp, tanh

mp.dps = 40


def sig(v):
    return 1 / (1 + exp(-v))


def step(x, h, w):
    r = sig(w["w_r"] * x + w["u_r"] * h)
    mu = sig(w["w_mu"] * x + w["u_mu"] * h)
    cand = tanh(w["w"] * x + r * (w["u"] * h))
    return r, mu, cand, (1 - mu) * h + mu * cand


w = {k: mpf("0.1") for k in ("w_r", "u_r", "w_mu", "u_mu", "w", "u")}
r, mu, cand, h = step(mpf(1), mpf("0.5"), w)
print("step1 r", mp.nstr(r, 20), "mu", mp.nstr(mu, 20), "cand", mp.nstr(cand, 20), "h", mp.nstr(h, 20))

# three steps, inputs 1, -2, 0.5, distinct weights
w2 = {"w_r": mpf("0.3"), "u_r": mpf("-0.2"), "w_mu": mpf("0.5"), "u_mu": mpf("0.4"),
      "w": mpf("-0.7"), "u": mpf("0.6")}
h = mpf(0)
for x in (mpf(1), mpf(-2), mpf("0.5")):
    *_, h = step(x, h, w2)
    print("seq h", mp.nstr(h, 20))
