"""Lexical answer-similarity metrics, one by one.

Everything here runs offline. The running example is a QA pair whose
prediction is semantically close to the ground truth but shares no tokens
with it, which is exactly where string metrics break down.
"""

from anssim import (
    Answer,
    SpanPrediction,
    bleu,
    exact_match,
    max_over_references,
    meteor,
    rouge_l,
    token_f1,
    top_n_accuracy,
)

gold = "40,000"
prediction = "tens of thousands"

print("gold:      ", gold)
print("prediction:", prediction)
print()
print(f"exact_match: {exact_match(prediction, gold):.2f}")
print(f"token F1:    {token_f1(prediction, gold):.2f}")
print(f"BLEU:        {bleu(prediction, gold):.4f}")
print(f"ROUGE-L:     {rouge_l(prediction, gold):.2f}")
print(f"METEOR:      {meteor(prediction, gold):.2f}")
print()
print("All zero (or epsilon): no token overlap, so every lexical metric")
print("treats a reasonable prediction as completely wrong.")

# Token F1 rewards partial overlap and is direction-symmetric.
print()
print("partial overlap:")
for a, b in [("Joseph Priestley", "Priestley"), ("UV light", "UV")]:
    print(f"  F1({a!r}, {b!r}) = {token_f1(a, b):.4f}")

# Sequence metrics care about order, not just overlap.
print()
print("order sensitivity:")
print(f"  ROUGE-L('the cat sat', 'the cat')      = {rouge_l('the cat sat', 'the cat'):.2f}")
print(f"  ROUGE-L('sat the cat', 'the cat sat')  = {rouge_l('sat the cat', 'the cat sat'):.2f}")
print(f"  BLEU('the cat sat', 'the cat sat down')= {bleu('the cat sat', 'the cat sat down'):.4f}")

# Top-n accuracy compares character spans inside the context, not strings.
context_id = "amazon-paragraph-1"
preds = SpanPrediction(
    answers=(
        Answer("tens of thousands", span=(22, 39), context_id=context_id),
        Answer("40,000", span=(70, 76), context_id=context_id),
    )
)
gold_answer = Answer("40,000", span=(70, 76), context_id=context_id)
print()
print("top-n accuracy over spans:")
print(f"  top-1 = {top_n_accuracy(preds, gold_answer, n=1):.2f}  (best span misses)")
print(f"  top-2 = {top_n_accuracy(preds, gold_answer, n=2):.2f}  (second span overlaps)")

# With multi-way annotations, a prediction scores against its best reference.
references = ["tens of thousands", "40,000"]
print()
print("max over ground truths:")
print(f"  EM('40,000' vs {references}) = "
      f"{max_over_references(exact_match, '40,000', references):.2f}")
