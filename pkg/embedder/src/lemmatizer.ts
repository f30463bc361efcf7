/**
 * Small rule-based English lemmatizer: an irregular-form table backed by
 * suffix-stripping rules. Outputs are fixed points of the lemmatizer
 * itself, which keeps the whole preprocessing pipeline idempotent.
 */

const IRREGULAR = new Map<string, string>([
  ["ran", "run"],
  ["went", "go"],
  ["gone", "go"],
  ["was", "be"],
  ["were", "be"],
  ["is", "be"],
  ["are", "be"],
  ["am", "be"],
  ["been", "be"],
  ["did", "do"],
  ["done", "do"],
  ["does", "do"],
  ["had", "have"],
  ["has", "have"],
  ["said", "say"],
  ["made", "make"],
  ["got", "get"],
  ["took", "take"],
  ["taken", "take"],
  ["saw", "see"],
  ["seen", "see"],
  ["came", "come"],
  ["knew", "know"],
  ["known", "know"],
  ["gave", "give"],
  ["given", "give"],
  ["found", "find"],
  ["thought", "think"],
  ["told", "tell"],
  ["became", "become"],
  ["left", "leave"],
  ["felt", "feel"],
  ["brought", "bring"],
  ["began", "begin"],
  ["begun", "begin"],
  ["kept", "keep"],
  ["held", "hold"],
  ["wrote", "write"],
  ["written", "write"],
  ["stood", "stand"],
  ["heard", "hear"],
  ["let", "let"],
  ["meant", "mean"],
  ["set", "set"],
  ["met", "meet"],
  ["paid", "pay"],
  ["sat", "sit"],
  ["spoke", "speak"],
  ["spoken", "speak"],
  ["lay", "lie"],
  ["led", "lead"],
  ["grew", "grow"],
  ["grown", "grow"],
  ["lost", "lose"],
  ["fell", "fall"],
  ["fallen", "fall"],
  ["sent", "send"],
  ["built", "build"],
  ["understood", "understand"],
  ["drew", "draw"],
  ["drawn", "draw"],
  ["broke", "break"],
  ["broken", "break"],
  ["spent", "spend"],
  ["cut", "cut"],
  ["men", "man"],
  ["women", "woman"],
  ["children", "child"],
  ["people", "person"],
  ["feet", "foot"],
  ["teeth", "tooth"],
  ["mice", "mouse"],
  ["geese", "goose"],
]);

const VOWELS = new Set(["a", "e", "i", "o", "u"]);

function isConsonant(ch: string): boolean {
  return ch.length === 1 && ch >= "a" && ch <= "z" && !VOWELS.has(ch);
}

/** Collapse a doubled final consonant left by -ing/-ed stripping (runn -> run). */
function undouble(stem: string): string {
  const n = stem.length;
  if (n >= 3 && stem[n - 1] === stem[n - 2] && isConsonant(stem[n - 1]) && stem[n - 1] !== "l" && stem[n - 1] !== "s") {
    return stem.slice(0, -1);
  }
  return stem;
}

function stripSuffixes(word: string): string {
  if (word.endsWith("ies") && word.length > 4) {
    return word.slice(0, -3) + "y";
  }
  if (word.endsWith("sses") && word.length > 5) {
    return word.slice(0, -2);
  }
  if (word.endsWith("ches") || word.endsWith("shes") || word.endsWith("xes") || word.endsWith("zes")) {
    if (word.length > 4) {
      return word.slice(0, -2);
    }
  }
  if (word.endsWith("ing") && word.length > 5) {
    const stem = undouble(word.slice(0, -3));
    return stem.length >= 3 ? stem : word;
  }
  if (word.endsWith("ied") && word.length > 4) {
    return word.slice(0, -3) + "y";
  }
  if (word.endsWith("ed") && word.length > 4) {
    const stem = undouble(word.slice(0, -2));
    return stem.length >= 3 ? stem : word;
  }
  if (word.endsWith("s") && word.length > 3 && !word.endsWith("ss") && !word.endsWith("us") && !word.endsWith("is")) {
    return word.slice(0, -1);
  }
  return word;
}

/**
 * Lemmatize one token. Matching is case-insensitive; when a rule fires
 * the lemma comes back lowercase, otherwise the token passes through
 * unchanged. Punctuation-only tokens are never touched.
 */
export function lemmatize(token: string): string {
  const lower = token.toLowerCase();
  if (!/^[a-z]+$/.test(lower)) {
    return token;
  }
  const irregular = IRREGULAR.get(lower);
  if (irregular !== undefined) {
    return irregular;
  }
  const stripped = stripSuffixes(lower);
  return stripped === lower ? token : stripped;
}
