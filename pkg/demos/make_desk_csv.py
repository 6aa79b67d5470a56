"""Write the bundled synthetic complaint export to desk.csv for the CLI walkthrough.

The outcomes lean strongly on topic words, which gives the generators a clear signal.
"""

import sys

from complaintlab.fixtures import desk_corpus_csv

path = sys.argv[1] if len(sys.argv) > 1 else "desk.csv"
with open(path, "wb") as fh:
    fh.write(desk_corpus_csv(2000, seed=7, lean=1.0))
print("wrote", path)
