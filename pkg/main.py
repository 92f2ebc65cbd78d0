import sys

from src.cli.run import run


def main():
    """
    Main entry point of the collision-force-map toolkit.
    Logging is configured by the CLI from --verbose / --log-file.
    """
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
