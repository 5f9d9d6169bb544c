"""Free Wigner chaos calculus."""
