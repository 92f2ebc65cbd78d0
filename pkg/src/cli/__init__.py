# cli/__init__.py
pass
