"""Model wrapper: loads an extractive QA model and answers with char offsets.

Span selection runs directly on the model's start/end logits: the best
(start, end) pair within the context segment and the answer-length budget
wins, scored by the product of the start and end softmax probabilities. The
model operates on subword tokens; the alignment back to character offsets
happens here so clients never see tokenizer details. When the chosen span
cannot be aligned, offsets degrade to -1/-1 ("text only") rather than lying
about positions.
"""

from __future__ import annotations

import logging

logger = logging.getLogger(__name__)


class ModelLoadError(RuntimeError):
    pass


class ExtractiveQaModel:
    """Answerer backed by a span-prediction transformer.

    Parameters mirror the serving flags: model is a hub id or a local
    directory; max_answer_length is in model tokens;
    handle_impossible_answer lets the no-answer score win with an empty
    answer instead of forcing a span.
    """

    def __init__(
        self,
        model: str,
        max_answer_length: int = 15,
        handle_impossible_answer: bool = False,
        max_seq_length: int = 512,
    ):
        try:
            import torch
            from transformers import AutoModelForQuestionAnswering, AutoTokenizer

            self._torch = torch
            self._tokenizer = AutoTokenizer.from_pretrained(model)
            self._model = AutoModelForQuestionAnswering.from_pretrained(model)
            self._model.eval()
        except Exception as exc:
            raise ModelLoadError(f"cannot load QA model {model!r}: {exc}") from exc
        self.max_answer_length = max_answer_length
        self.handle_impossible_answer = handle_impossible_answer
        self.max_seq_length = max_seq_length

    def context_token_count(self, context: str) -> int:
        return len(self._tokenizer.encode(context, add_special_tokens=False))

    def answer(self, question: str, context: str) -> tuple[str, int, int, float]:
        torch = self._torch
        encoded = self._tokenizer(
            question,
            context,
            return_tensors="pt",
            return_offsets_mapping=True,
            truncation="only_second",
            max_length=self.max_seq_length,
        )
        offsets = encoded.pop("offset_mapping")[0].tolist()
        sequence_ids = encoded.sequence_ids(0)
        with torch.no_grad():
            output = self._model(**encoded)
        start_probs = torch.softmax(output.start_logits[0], dim=-1)
        end_probs = torch.softmax(output.end_logits[0], dim=-1)

        context_idx = [i for i, sid in enumerate(sequence_ids) if sid == 1]
        best = None  # (prob, start_idx, end_idx)
        for i in context_idx:
            for j in context_idx:
                if j < i or j - i + 1 > self.max_answer_length:
                    continue
                prob = float(start_probs[i] * end_probs[j])
                if best is None or prob > best[0]:
                    best = (prob, i, j)
        if best is None:
            return "", -1, -1, 0.0

        if self.handle_impossible_answer:
            # by convention the no-answer score lives at the first token
            null_prob = float(start_probs[0] * end_probs[0])
            if null_prob > best[0]:
                return "", -1, -1, min(1.0, max(0.0, null_prob))

        prob, i, j = best
        char_start, char_end = offsets[i][0], offsets[j][1]
        score = min(1.0, max(0.0, prob))
        if char_start >= char_end or char_end > len(context):
            return "", -1, -1, score
        text = context[char_start:char_end]
        return text, char_start, char_end, score
