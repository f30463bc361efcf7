/**
 * Text preprocessing: URL removal, contraction expansion, charset
 * filtering (letters plus ! ? , .), tokenization, stop-token filtering,
 * and lemmatization. The pipeline is deterministic and idempotent for a
 * fixed spec.
 */

import { lemmatize } from "./lemmatizer.js";

const CONTRACTIONS = new Map<string, string>([
  ["can't", "cannot"],
  ["won't", "will not"],
  ["shan't", "shall not"],
  ["ain't", "is not"],
  ["aren't", "are not"],
  ["couldn't", "could not"],
  ["didn't", "did not"],
  ["doesn't", "does not"],
  ["don't", "do not"],
  ["hadn't", "had not"],
  ["hasn't", "has not"],
  ["haven't", "have not"],
  ["isn't", "is not"],
  ["mightn't", "might not"],
  ["mustn't", "must not"],
  ["needn't", "need not"],
  ["shouldn't", "should not"],
  ["wasn't", "was not"],
  ["weren't", "were not"],
  ["wouldn't", "would not"],
  ["i'm", "i am"],
  ["i've", "i have"],
  ["i'll", "i will"],
  ["i'd", "i would"],
  ["you're", "you are"],
  ["you've", "you have"],
  ["you'll", "you will"],
  ["you'd", "you would"],
  ["he's", "he is"],
  ["he'll", "he will"],
  ["he'd", "he would"],
  ["she's", "she is"],
  ["she'll", "she will"],
  ["she'd", "she would"],
  ["it's", "it is"],
  ["it'll", "it will"],
  ["we're", "we are"],
  ["we've", "we have"],
  ["we'll", "we will"],
  ["we'd", "we would"],
  ["they're", "they are"],
  ["they've", "they have"],
  ["they'll", "they will"],
  ["they'd", "they would"],
  ["that's", "that is"],
  ["there's", "there is"],
  ["here's", "here is"],
  ["what's", "what is"],
  ["who's", "who is"],
  ["where's", "where is"],
  ["let's", "let us"],
  ["o'clock", "of the clock"],
  ["y'all", "you all"],
]);

export interface PreprocessSpec {
  /** Tokens dropped after tokenization; ships empty, user-supplied. */
  stopTokens: Set<string>;
  /** Apply the rule-based lemmatizer after filtering. */
  lemmatize: boolean;
}

export function defaultSpec(): PreprocessSpec {
  return { stopTokens: new Set(), lemmatize: true };
}

export function expandContractions(text: string): string {
  return text.replace(/[A-Za-z]+'[A-Za-z]+/g, (match) => {
    const expansion = CONTRACTIONS.get(match.toLowerCase());
    return expansion !== undefined ? expansion : match;
  });
}

function stripUrls(text: string): string {
  return text.replace(/(?:https?:\/\/|www\.)\S+/gi, " ");
}

/** Keep letters, whitespace, and the retained punctuation (! ? , .). */
function filterCharset(text: string): string {
  return text.replace(/[^A-Za-z!?,.\s]+/g, "");
}

export function tokenize(text: string): string[] {
  return text.split(/\s+/).filter((t) => t.length > 0);
}

export function preprocess(text: string, spec: PreprocessSpec = defaultSpec()): string {
  const cleaned = filterCharset(expandContractions(stripUrls(text)));
  let tokens = tokenize(cleaned);
  if (spec.stopTokens.size > 0) {
    tokens = tokens.filter((t) => !spec.stopTokens.has(t.toLowerCase()));
  }
  if (spec.lemmatize) {
    tokens = tokens.map(lemmatize);
  }
  return tokens.join(" ");
}
