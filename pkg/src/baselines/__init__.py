# baselines/__init__.py
pass
