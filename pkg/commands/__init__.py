# CLI subcommands package
