class WandbLogger:
    """
    Mirror sweep metrics and result tables to `Weights and Biases`.
    """
    def __init__(self, opt):
        try:
            import wandb
        except ImportError:
            raise ImportError(
                "To use the Weights and Biases Logger please install wandb."
                "Run `pip install wandb` to install it."
            )

        self._wandb = wandb

        # Initialize a W&B run
        if self._wandb.run is None:
            self._wandb.init(
                project=opt['wandb']['project'],
                name=opt['name'],
                config=opt,
                dir='./experiments'
            )

        self.config = self._wandb.config

    def log_metrics(self, metrics, commit=True):
        """
        Log sweep scalars onto W&B.

        metrics: dictionary of metrics to be logged
        """
        self._wandb.log(metrics, commit=commit)

    def log_table(self, key_name, frame):
        """
        Log a result DataFrame as a W&B table.
        """
        self._wandb.log({key_name: self._wandb.Table(dataframe=frame)})

    def finish(self):
        self._wandb.finish()
