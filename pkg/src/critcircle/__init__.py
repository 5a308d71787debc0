"""Critical circle maps near bifurcation: Farey arithmetic, tongues, scalings, dimensions."""
