from dsdomain.cli.main import main

main()
