export { Rng } from "./rng";
export { CLS, SEP, DEFAULT_MAX_LEN, buildPairInput, buildQuestionInput, tokenize } from "./tokenizer";
export {
  DEFAULT_LOSS,
  LossConfig,
  combinedLoss,
  crossEntropy,
  dscLoss,
  dscTerm,
  lossGradLogit,
} from "./loss";
export {
  DEFAULT_ENCODER,
  EncoderConfig,
  EncoderOutput,
  HashEmbeddingEncoder,
  tokenBucket,
} from "./encoder";
export { DEFAULT_OPTIM, OptimConfig, PairScorer, TrainExample } from "./model";
export { ResamplingSampler } from "./sampler";
export {
  Corpus,
  DescriptionRecord,
  DocumentRecord,
  PairExample,
  QuestionRecord,
  Target,
  buildPairDataset,
  cellKey,
  descriptionsForDoc,
  loadCorpus,
  loadDescriptions,
  readJsonl,
} from "./data";
export {
  DEFAULT_TRAIN,
  StepLog,
  TrainConfig,
  TrainResult,
  loadCheckpoint,
  recallAt1,
  saveCheckpoint,
  trainScorer,
} from "./train";
export { ScoredCandidate, microRecall, selectTopK } from "./topk";
export { ExportModels, ExportPaths, exportScores } from "./export";
