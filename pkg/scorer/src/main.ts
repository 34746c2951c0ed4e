/** Tiny CLI: `train` fits the three models from a config file, `export`
 * writes the scores/labels files the pipeline's external scorer consumes.
 *
 * Config JSON keys (all optional except corpus/descriptions):
 *   corpus, descriptions, checkpoint_dir, out_dir,
 *   encoder: {buckets, dim, seed}, lambda, epsilon, positive_fraction,
 *   batch_size, epochs, seed, lr, max_len
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { buildPairDataset, loadCorpus, loadDescriptions, Target } from "./data";
import { DEFAULT_ENCODER } from "./encoder";
import { exportScores } from "./export";
import { DEFAULT_OPTIM } from "./model";
import { DEFAULT_TRAIN, loadCheckpoint, saveCheckpoint, trainScorer } from "./train";

interface FileConfig {
  corpus: string;
  descriptions: string;
  checkpoint_dir?: string;
  out_dir?: string;
  encoder?: { buckets?: number; dim?: number; seed?: number };
  lambda?: number;
  epsilon?: number;
  positive_fraction?: number;
  batch_size?: number;
  epochs?: number;
  seed?: number;
  lr?: number;
  max_len?: number;
}

function readConfig(file: string): FileConfig {
  const cfg: FileConfig = JSON.parse(fs.readFileSync(file, "utf-8"));
  // relative paths resolve against the config file's directory
  const base = path.dirname(path.resolve(file));
  const resolve = (p?: string) => (p ? path.resolve(base, p) : p);
  cfg.corpus = resolve(cfg.corpus)!;
  cfg.descriptions = resolve(cfg.descriptions)!;
  cfg.checkpoint_dir = resolve(cfg.checkpoint_dir);
  cfg.out_dir = resolve(cfg.out_dir);
  return cfg;
}

function trainAll(cfg: FileConfig): void {
  const corpus = loadCorpus(cfg.corpus);
  const descriptions = loadDescriptions(cfg.descriptions);
  const ckptDir = cfg.checkpoint_dir ?? "checkpoints";
  const trainCfg = {
    ...DEFAULT_TRAIN,
    encoder: { ...DEFAULT_ENCODER, ...(cfg.encoder ?? {}) },
    loss: { lambda: cfg.lambda ?? 0.5, dscEpsilon: cfg.epsilon ?? 1.0 },
    optim: { ...DEFAULT_OPTIM, lr: cfg.lr ?? DEFAULT_OPTIM.lr },
    batchSize: cfg.batch_size ?? DEFAULT_TRAIN.batchSize,
    epochs: cfg.epochs ?? DEFAULT_TRAIN.epochs,
    positiveFraction: cfg.positive_fraction ?? DEFAULT_TRAIN.positiveFraction,
    seed: cfg.seed ?? 0,
  };
  for (const target of ["text", "table_desc", "qtype"] as Target[]) {
    const dataset = buildPairDataset(corpus, descriptions, target, cfg.max_len);
    const result = trainScorer(dataset, trainCfg);
    const file = saveCheckpoint(ckptDir, target, result);
    const last = result.log[result.log.length - 1];
    console.log(
      `trained ${target}: ${dataset.length} pairs, ${result.log.length} steps, ` +
        `final loss ${last.loss.toFixed(4)} -> ${file}`,
    );
  }
}

function exportAll(cfg: FileConfig): void {
  const corpus = loadCorpus(cfg.corpus);
  const descriptions = loadDescriptions(cfg.descriptions);
  const ckptDir = cfg.checkpoint_dir ?? "checkpoints";
  const paths = exportScores(
    {
      text: loadCheckpoint(ckptDir, "text"),
      tableDesc: loadCheckpoint(ckptDir, "table_desc"),
      qtype: loadCheckpoint(ckptDir, "qtype"),
    },
    corpus,
    descriptions,
    cfg.out_dir ?? "export",
    cfg.max_len,
  );
  console.log(`exported ${paths.scores} and ${paths.labels}`);
}

function main(): void {
  const [command, flag, configFile] = process.argv.slice(2);
  if (!command || flag !== "--config" || !configFile) {
    console.error("usage: node dist/main.js <train|export> --config <config.json>");
    process.exit(1);
  }
  const cfg = readConfig(configFile);
  if (command === "train") trainAll(cfg);
  else if (command === "export") exportAll(cfg);
  else {
    console.error(`unknown command ${command}`);
    process.exit(1);
  }
}

main();
