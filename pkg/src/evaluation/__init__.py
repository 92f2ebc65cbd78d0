# evaluation/__init__.py
pass
