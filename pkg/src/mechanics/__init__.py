# mechanics/__init__.py
pass
