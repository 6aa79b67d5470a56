"""
Cleaning, tokenizing and summarizing narratives
===============================================

A complaint narrative is cleaned (redactions and control characters removed),
tokenized, and summarized by keeping its highest-scoring sentences. The
cosine similarity of word counts says how much of the original survives.
"""

from complaintlab.ingest import clean_narrative, extract_dollar_value
from complaintlab.text import Vocabulary, cosine_similarity, count_vector, summarize_extractive, tokenize

raw = ("On XX/XX/2023 I noticed unexpected fees charged to my credit account.   The bank said "
       "the $35.00 fee was part of my agreement. I never agreed to it. The statements were also "
       "inaccurate and I was charged $1,250.00 for a purchase I returned. Please help me get a refund.")

text = clean_narrative(raw)
print(text)
print("first dollar amount:", extract_dollar_value(raw))

# tokens are lowercase runs of letters and digits
print(tokenize("Unexpected fees, and FEES"))

# a short sentence and its summary, compared over their shared vocabulary
original = "unexpected fees charged to my credit account and inaccurate statements"
summary = "unexpected fees and inaccurate credit statements"
vocab = Vocabulary(tokenize(original) + tokenize(summary))
a, b = count_vector(tokenize(original), vocab), count_vector(tokenize(summary), vocab)
print(vocab.words)
print(a.to_array(), b.to_array())
print("cosine similarity: %.4f" % cosine_similarity(a, b))

# extractive summary of the longer narrative under a 20 word budget
short = summarize_extractive(text, max_words=20)
print(short)
