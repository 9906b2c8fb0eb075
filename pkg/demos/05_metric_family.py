"""The evaluation-metric family, threshold/prediction grounding and
annotation scoring.

MRAER is the headline relative metric: it divides each absolute error by the
target's (capped) deviation from the target mean, so 1.0 means "no better
than always predicting the mean" and lower is better.
"""

import numpy as np

from rtm import (
    MetricConfig,
    ScoreStats,
    bws_scores,
    ground_predictions,
    ground_threshold,
    iaa_tau,
    metric_report,
    optimize_threshold,
    rank_error,
    riaa_tau,
)

rng = np.random.default_rng(3)
y = rng.uniform(0, 1, 120)

print("metric reports (tab format, fixed order):\n")
for label, y_hat in (
    ("decent model ", np.clip(y + rng.normal(0, 0.1, 120), 0, 1)),
    ("mean predictor", np.full(120, y.mean()) + rng.normal(0, 1e-6, 120)),
):
    report = metric_report(y_hat, y, MetricConfig("half_step", 0.05))
    row = {name: value for name, value in report.rows()}
    print(f"  {label}: r={row['r']:.3f}  RAE={row['RAE']:.3f}  MRAER={row['MRAER']:.3f}")

# --- symbolic grounding -----------------------------------------------------
# Express a training threshold as mu + z*sigma and re-evaluate it on the test
# score distribution; map predictions onto the training-gold statistics.

train_scores = rng.normal(0.45, 0.1, 400)
test_scores = rng.normal(0.55, 0.15, 200)
t_train = 0.5
t_test = ground_threshold(
    t_train, ScoreStats.of(train_scores), ScoreStats.of(test_scores)
)
print(f"\nthreshold {t_train} on train stats -> {t_test:.3f} on test stats")

y_hat = 0.2 * y + rng.normal(0, 0.02, 120)  # badly scaled predictions
grounded = ground_predictions(y_hat, ScoreStats.of(y))
print(f"prediction grounding: mean {y_hat.mean():.3f}->{grounded.mean():.3f}, "
      f"std {y_hat.std():.3f}->{grounded.std():.3f} (correlation untouched)")

# --- threshold optimization -------------------------------------------------
scores = np.array([0.1, 0.35, 0.45, 0.62, 0.71, 0.9])
labels = np.array([0, 0, 0, 1, 1, 1])
print("\noptimized threshold:", optimize_threshold(scores, labels))

# --- ranking robustness ------------------------------------------------------
cv_scores = [0.21, 0.25, 0.30, 0.33]
test_scores = [0.22, 0.31, 0.29, 0.35]
print("rank error between CV and test orderings:", round(rank_error(cv_scores, test_scores), 4))

# --- annotation scoring ------------------------------------------------------
annotations = [
    (("t1", "t2", "t3", "t4"), "t1", "t4"),
    (("t1", "t2", "t3", "t4"), "t1", "t3"),
    (("t1", "t2", "t3", "t4"), "t2", "t4"),
]
print("\nbest-worst scaling scores:", {k: round(v, 3) for k, v in bws_scores(annotations).items()})

pairs = [(1, 1), (2, 2), (3, 3), (4, 5), (5, 4), (6, 6)]
print("IAA tau:", round(iaa_tau(pairs), 3), " randomized IAA tau:", round(riaa_tau(pairs, seed=0), 3))
