import sys

from .config import setup

if __name__ == "__main__":
	config = setup(sys.argv[1:])

	config.func(config)

	exit()
