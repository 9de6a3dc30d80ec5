"""Write the shipped CSV snapshots (no header; features then a {0,1} label)."""
import csv
import pathlib

from sklearn import datasets

OUT = pathlib.Path(__file__).resolve().parent.parent / "data"


def write(name, rows, labels):
    with open(OUT / f"{name}.csv", "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for x, y in zip(rows, labels):
            w.writerow([repr(float(v)) for v in x] + [int(y)])


def main():
    OUT.mkdir(exist_ok=True)
    iris = datasets.load_iris()
    keep = iris.target < 2
    write("iris01", iris.data[keep], iris.target[keep] == 1)
    write("iris0n0", iris.data, iris.target == 0)
    write("iris1n1", iris.data, iris.target == 1)
    cancer = datasets.load_breast_cancer()
    write("cancer01", cancer.data, cancer.target)
    wine = datasets.load_wine()
    write("wine0n0", wine.data, wine.target == 0)


if __name__ == "__main__":
    main()
