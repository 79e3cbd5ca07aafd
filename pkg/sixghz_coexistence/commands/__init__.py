# Subcommands of the sixghz-coexistence CLI
