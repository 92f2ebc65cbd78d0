# tests/__init__.py
# Test suite of the collision-force-map toolkit; run with `pytest` from the repository root.
pass
