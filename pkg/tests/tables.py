"""Published optimum tables used as fixtures (shortest time and smallest node-hours)."""

from ccsdperf.data import Dataset, RunRecord

# (O, V, nodes, tile, runtime_s): best measured configuration per problem size
STQ_ROWS = [
    (44, 260, 5, 40, 17.41), (81, 835, 185, 80, 66.81), (85, 698, 220, 60, 47.05),
    (99, 718, 260, 60, 53.83), (99, 1021, 400, 60, 112.70), (116, 575, 240, 60, 38.35),
    (116, 840, 350, 60, 79.95), (116, 1184, 400, 80, 180.30), (134, 523, 200, 70, 41.86),
    (134, 951, 400, 70, 122.95), (134, 1200, 800, 80, 196.70), (146, 278, 90, 70, 17.92),
    (146, 591, 120, 70, 62.89), (146, 1096, 300, 73, 186.18), (146, 1568, 800, 80, 393.72),
    (180, 720, 220, 70, 104.36), (180, 1070, 320, 80, 232.88), (196, 764, 300, 80, 124.95),
    (204, 969, 320, 90, 214.17), (235, 1007, 400, 100, 291.99), (280, 1040, 110, 100, 605.93),
    (345, 791, 400, 110, 282.83),
]

# runner-up configurations listed alongside three of the rows above
STQ_ALTERNATES = [
    (116, 575, 220, 60, 38.78), (146, 591, 120, 80, 66.18), (146, 1568, 900, 80, 397.1),
]

# (O, V, nodes, tile, runtime_s, node_hours as printed)
BQ_ROWS = [
    (44, 260, 5, 40, 17.41, 0.02), (81, 835, 25, 80, 193.26, 1.34),
    (85, 698, 15, 120, 146.45, 0.61), (99, 718, 15, 110, 173.41, 0.72),
    (99, 1021, 35, 110, 285.94, 2.78), (116, 575, 15, 90, 123.51, 0.51),
    (116, 840, 35, 90, 178.26, 1.73), (116, 1184, 15, 120, 682.15, 2.84),
    (134, 523, 65, 90, 58.25, 1.05), (134, 951, 35, 130, 282.70, 2.75),
    (134, 1200, 45, 120, 469.57, 5.87), (146, 278, 10, 120, 38.67, 0.11),
    (146, 591, 30, 100, 102.96, 0.86), (146, 1096, 30, 140, 498.74, 4.16),
    (146, 1568, 200, 90, 616.39, 34.24), (180, 720, 20, 130, 293.36, 1.63),
    (180, 1070, 30, 120, 591.97, 4.93), (196, 764, 50, 110, 247.22, 3.43),
    (204, 969, 90, 90, 380.81, 9.52), (235, 1007, 25, 140, 907.16, 6.30),
    (280, 1040, 50, 130, 876.74, 12.18), (345, 791, 50, 130, 589.65, 8.19),
]

BQ_ALTERNATES = [
    (99, 718, 15, 90, 182.32, 0.76), (116, 1184, 15, 140, 706.92, 2.95),
    (134, 951, 25, 140, 565.37, 3.93), (146, 278, 10, 100, 38.83, 0.11),
    (280, 1040, 40, 140, 1163.77, 12.93),
]


def dataset(rows) -> Dataset:
    return Dataset(tuple(RunRecord(*r[:5]) for r in rows), "fixture")


def stq_fixture() -> Dataset:
    return dataset(STQ_ROWS + STQ_ALTERNATES)


def bq_fixture() -> Dataset:
    return dataset(BQ_ROWS + BQ_ALTERNATES)
