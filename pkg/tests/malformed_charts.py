"""Twenty malformed chart sources, each with a distinct defect."""

MALFORMED = [
    # (label, source)
    ("missing chart keyword",
     "graph g { params: a in [0, 1]; matrix: [[a]]; }"),
    ("missing name",
     "chart { params: a in [0, 1]; matrix: [[a]]; }"),
    ("missing open brace",
     "chart g params: a in [0, 1]; matrix: [[a]]; }"),
    ("missing params section",
     "chart g { matrix: [[1]]; }"),
    ("param without in",
     "chart g { params: a [0, 1]; matrix: [[a]]; }"),
    ("range not bracketed",
     "chart g { params: a in (0, 1); matrix: [[a]]; }"),
    ("empty range",
     "chart g { params: a in [1, 0]; matrix: [[a]]; }"),
    ("duplicate parameter",
     "chart g { params: a in [0, 1], a in [0, 2]; matrix: [[a]]; }"),
    ("missing semicolon",
     "chart g { params: a in [0, 1] matrix: [[a]]; }"),
    ("unknown group tag",
     "chart g { params: a in [0, 1]; group: su(2); matrix: [[a]]; }"),
    ("missing matrix section",
     "chart g { params: a in [0, 1]; }"),
    ("ragged matrix",
     "chart g { params: a in [0, 1]; matrix: [[a, a], [a]]; }"),
    ("unknown function",
     "chart g { params: a in [0, 1]; matrix: [[sinh(a)]]; }"),
    ("unknown variable",
     "chart g { params: a in [0, 1]; matrix: [[b]]; }"),
    ("fractional exponent",
     "chart g { params: a in [0, 1]; matrix: [[a^0.5]]; }"),
    ("dangling operator",
     "chart g { params: a in [0, 1]; matrix: [[a +]]; }"),
    ("unbalanced parenthesis",
     "chart g { params: a in [0, 1]; matrix: [[sin(a]]; }"),
    ("unterminated chart",
     "chart g { params: a in [0, 1]; matrix: [[a]];"),
    ("stray character",
     "chart g { params: a in [0, 1]; matrix: [[a @ a]]; }"),
    ("empty matrix",
     "chart g { params: a in [0, 1]; matrix: []; }"),
]

assert len(MALFORMED) == 20
