import os

# Static settings for the diagram generators and renderers
GENERATOR_CONFIG = {
    # one colour per family, cycled when n exceeds the palette
    "family_colors": ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"],
    "canonical_tie_break": "lexicographic",
    "max_iso_darts": 20000,   # isomorphism search refuses larger maps
    "max_complex_simplices": 200000,
    "fixtures_dir": os.path.join(os.path.dirname(__file__), "fixtures"),
    "fixtures": {
        "cp2": "cp2.msd",
        "cp2_slides": "cp2xs1_slides.txt",
        "boundary_tetrahedron": "boundary_tetrahedron.txt",
    },
}
