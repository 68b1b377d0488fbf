"""Reference tables kept as printed text and parsed here, independent of the package."""

# Variable-node table for channel +C: rows m1 = -L3..L3, columns m2 = -L3..L3.
TABLE_I = """
-L3 -L3 -L2 -L1 -L1 -L1  L1
-L3 -L1 -L1   0  L1  L1  L3
-L2 -L1   0   0  L1  L2  L3
-L1   0   0  L1  L2  L3  L3
-L1  L1  L1  L2  L2  L3  L3
-L1  L1  L2  L3  L3  L3  L3
 L1  L3  L3  L3  L3  L3  L3
"""

# Incoming-message multisets that decimate a +C node to +1.
TABLE_II = """
L3 L3 L3 | L3 L3 L2 | L3 L3 L1 | L3 L3 0 | L3 L3 -L1
L3 L2 L2 | L3 L2 L1 | L3 L2 0 | L3 L2 -L1 | L3 L1 L1
L3 L1 0 | L3 L1 -L1 | L3 0 0 | L2 L2 L2 | L2 L2 L1
"""


def level(tok):
    return 0 if tok == "0" else (-1 if tok[0] == "-" else 1) * int(tok[-1])


REF_VN_TABLE = [[level(t) for t in row.split()] for row in TABLE_I.strip().splitlines()]

REF_TRIPLES = {tuple(sorted(level(t) for t in chunk.split()))
                 for chunk in TABLE_II.replace("\n", "|").split("|") if chunk.split()}
