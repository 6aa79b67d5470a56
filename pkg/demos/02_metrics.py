"""
Four evaluation metrics from one confusion table
================================================
"""

import numpy as np

from complaintlab.metrics import ConfusionCounts, accuracy, evaluate_all, f1_from_counts, kappa_from_counts, mcc

c = ConfusionCounts(tp=40, fp=10, tn=35, fn=15)
print("accuracy", accuracy(c))
print("weighted F1", f1_from_counts(c), "binary F1", f1_from_counts(c, "binary"))
print("MCC", mcc(c), "kappa", kappa_from_counts(c))

# a classifier that always says "meritorious" on balanced data is at chance on MCC and kappa
y = np.array([1] * 50 + [0] * 50)
print(evaluate_all(y, np.ones(100, dtype=int)).percentages())

# when the table is symmetric (tp = tn, fp = fn) MCC and kappa coincide
sym = ConfusionCounts(tp=30, fp=20, tn=30, fn=20)
print(mcc(sym), kappa_from_counts(sym))
