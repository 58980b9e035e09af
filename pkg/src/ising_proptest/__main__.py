from .harness_cli import main

raise SystemExit(main())
