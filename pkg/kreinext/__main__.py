from .cli import main


if __name__ == "__main__":
    # Allow 'python -m kreinext'
    main()
