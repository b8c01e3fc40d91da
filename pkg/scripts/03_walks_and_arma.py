"""
Random walks in the Olympus and a Box-Jenkins fit
=================================================
"""
import warnings

from olympus_lab.timeseries import (acf, box_jenkins_identify, correlation_length, fit_arma,
                                    ljung_box, random_walk)

# 1000 steps, every point evaluated on its own 1000 ICs (~15 s)
tr = random_walk("olympus", 1000, 1000, seed=1)
r = acf(tr, 10)
print("acf:", r.values[:6].round(3), "band:", round(r.band, 3))

tau, cross = correlation_length(tr)
print(f"tau = {tau:.1f}, band crossing at lag {cross}")

# rank orders by AIC; the smallest models come out on top
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    ident = box_jenkins_identify(tr)
for c in ident.candidates[:4]:
    print(c.p, c.q, round(c.aic, 4))

m = fit_arma(tr, 2, 1)
print("AR:", m.ar.round(3), "MA:", m.ma.round(3), "t:", m.tstat.round(1))
print("R2:", round(m.r2, 3))
Q, p = ljung_box(m.residuals, 20, m)
print(f"Ljung-Box h=20: Q={Q:.1f}, p={p:.3f}")
