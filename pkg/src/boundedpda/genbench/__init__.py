"""Instance generators and the exhaustive oracle."""
