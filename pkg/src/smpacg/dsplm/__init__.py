"""Prefix language model: vocab, masking, training objectives, decoding."""

from .vocab import BOS, EOS, MASK, PAD, SEP, SPECIAL_TOKENS, Vocab, VocabError, build_vocab
from .data import DataError, PrefixSample, corrupt_input, encode_prefix, encode_sample, split_text_sample
from .model import ModelConfig, ModelError, PrefixLM, attention_mask, forward
from .training import TrainConfig, TrainingError, batch_loss, finetune, perplexity, pretrain, train_step
from .decoding import DecodeConfig, DecodeError, generate_beam, generate_greedy
from .checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "PAD",
    "BOS",
    "EOS",
    "SEP",
    "MASK",
    "SPECIAL_TOKENS",
    "Vocab",
    "VocabError",
    "build_vocab",
    "DataError",
    "PrefixSample",
    "encode_prefix",
    "encode_sample",
    "corrupt_input",
    "split_text_sample",
    "ModelConfig",
    "ModelError",
    "PrefixLM",
    "attention_mask",
    "forward",
    "TrainConfig",
    "TrainingError",
    "batch_loss",
    "train_step",
    "pretrain",
    "finetune",
    "perplexity",
    "DecodeConfig",
    "DecodeError",
    "generate_beam",
    "generate_greedy",
    "save_checkpoint",
    "load_checkpoint",
]
