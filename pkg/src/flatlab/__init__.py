"""flatlab: a desk-scale laboratory for rank-one local systems and their jump
loci, Riemann theta identities, explicit flat line-bundle families, and
weighted dbar experiments on the punctured disk."""

__version__ = "0.1.0"
