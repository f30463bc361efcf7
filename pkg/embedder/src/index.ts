export { defaultSpec, expandContractions, preprocess, tokenize } from "./preprocess.js";
export type { PreprocessSpec } from "./preprocess.js";
export { lemmatize } from "./lemmatizer.js";
export { loadModel, ModelLoadError } from "./model.js";
export type { TokenEmbedder } from "./model.js";
export { embedCorpus } from "./corpus.js";
export type { EmbedOptions, EmbedResult } from "./corpus.js";
export {
  decodeFlat,
  decodeSequences,
  encodeSequences,
  FormatError,
  KIND_FLAT,
  KIND_SEQUENCES,
} from "./sdecfile.js";
