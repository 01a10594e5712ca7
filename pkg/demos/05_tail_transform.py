#!/usr/bin/env python3
"""The nonlinear tail transform and the decay classes it produces.

Given a dominating tail T for the individual differences, the transform
W[T](x) = min(1, inf_v [exp(-x^2/(8 v^2)) + second-moment-above-v]) bounds
the tail of every normalized partial sum at once.  Stretched-exponential
inputs exp(-(x/K)^q) come out with decay exponent 2q/(2+q).
"""
import math

import numpy as np

from uclt import TailFunction, uniform_sum_tail_bound, tail_second_moment, w_operator, weibull_sum_bound

print("== truncated second moments ==")
T = TailFunction.closed_weibull(1.0, 2.0)  # Gaussian-type tail exp(-x^2)
for v in (0.0, 0.5, 1.0, 2.0):
    print(f"  v={v:3.1f}  mass above v: {tail_second_moment(T, v):.5f}")
print(f"  bounded +-1 input (step tail): {tail_second_moment(TailFunction.step(1.0), 0.0):.1f} at v=0, "
      f"{tail_second_moment(TailFunction.step(1.0), 1.0):.1f} at v=1")

print("\n== the transform ==")
for x in (1.5, 2.0, 3.0, 6.0, 10.0):
    print(f"  x={x:4.1f}  W[exp(-x^2)] = {w_operator(T, x):.6f}   "
          f"W[step at 1] = {w_operator(TailFunction.step(1.0), x):.6f}")
print("  (for the step tail the transform is exactly exp(-x^2/8))")

print("\n== decay classes ==")
for q in (1.0, 2.0):
    Tq = TailFunction.closed_weibull(1.0, q)
    xs = np.geomspace(10, 100, 8)
    slopes = np.polyfit(np.log(xs),
                        np.log([-math.log(w_operator(Tq, float(x))) for x in xs]), 1)[0]
    print(f"  q={q}: structural exponent 2q/(2+q) = {2*q/(2+q):.3f}, "
          f"measured log-log slope of -log W = {slopes:.3f}")
    print(f"        closed-form class bound at x=20, c=1: "
          f"{weibull_sum_bound(1.0, q, 20.0, 1.0):.3e}")

print("\n== domination of an actual sign walk ==")
rng = np.random.default_rng(11)
R, n = 200_000, 256
walks = rng.integers(0, 2, (R, n)) * 2 - 1
eta = walks.sum(axis=1) / math.sqrt(n)
Tstep = TailFunction.step(1.0)
for x in (1.5, 2.0, 3.0):
    emp = max((eta > x).mean(), (eta < -x).mean())
    print(f"  x={x:3.1f}  empirical one-sided tail {emp:.5f}  uniform bound {uniform_sum_tail_bound(Tstep, x):.5f}")
