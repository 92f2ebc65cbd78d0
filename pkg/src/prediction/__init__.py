# prediction/__init__.py
pass
