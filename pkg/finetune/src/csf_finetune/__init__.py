"""csf-finetune: transformer fine-tuning adapter for csf exports."""

__version__ = "0.1.0"
