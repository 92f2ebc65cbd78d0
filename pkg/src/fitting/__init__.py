# fitting/__init__.py
pass
