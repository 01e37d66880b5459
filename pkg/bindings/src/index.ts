/**
 * Node bindings for the codetok subword tokenizer.
 *
 * Everything delegates to the `codetok` command-line interface over its
 * stdin/stdout streams and on-disk `.codetok.json` model files; no
 * tokenization logic is duplicated here. Batch calls run in a child
 * process, so the Node event loop stays free while encoding.
 */

import { execFile } from "node:child_process";
import { readFile } from "node:fs/promises";

/** Usage errors (exit code 1) from the underlying CLI. */
export class CodetokUsageError extends Error {}

/** Data errors (exit code 2): unreadable corpora, bad model files, ... */
export class CodetokDataError extends Error {}

export interface RunnerOptions {
  /** Python interpreter carrying the codetok package (default python3). */
  python?: string;
}

export interface TrainOptions extends RunnerOptions {
  algorithm: "bpe" | "unigram";
  level: 0 | 1 | 2 | 3 | 4;
  vocabSize: number;
  coverage?: number;
  seed?: number;
  seedMultiplier?: number;
}

export interface LengthStatsEntry {
  label: string;
  average_tokens: number;
  delta_pct: number;
}

export interface LengthStats {
  baseline: string;
  n_sequences: number;
  entries: LengthStatsEntry[];
}

function pythonOf(opts?: RunnerOptions): string {
  return opts?.python ?? process.env.CODETOK_PYTHON ?? "python3";
}

function runCli(
  python: string,
  args: string[],
  stdin: string,
): Promise<string> {
  return new Promise((resolve, reject) => {
    const child = execFile(
      python,
      ["-m", "codetok", ...args],
      { maxBuffer: 1 << 28 },
      (error, stdout, stderr) => {
        if (error) {
          const code = (error as NodeJS.ErrnoException & { code?: number }).code;
          const message = stderr.trim() || error.message;
          if (code === 1) {
            reject(new CodetokUsageError(message));
          } else {
            reject(new CodetokDataError(message));
          }
          return;
        }
        resolve(stdout);
      },
    );
    child.stdin?.write(stdin);
    child.stdin?.end();
  });
}

/**
 * A loaded tokenizer model. Instances are immutable and safe to share:
 * every call spawns an independent CLI process against the model file.
 */
export class BoundTokenizer {
  private constructor(
    readonly modelPath: string,
    readonly checksum: string,
    readonly vocabSize: number,
    readonly algorithm: string,
    readonly level: number,
    private readonly python: string,
  ) {}

  /**
   * Load a model file. The file is parsed locally only to surface
   * format problems early; all real work goes through the CLI.
   */
  static async load(
    modelPath: string,
    opts?: RunnerOptions,
  ): Promise<BoundTokenizer> {
    const python = pythonOf(opts);
    let doc: {
      format_version?: number;
      checksum?: string;
      vocab_size?: number;
      algorithm?: string;
      level?: number;
    };
    try {
      doc = JSON.parse(await readFile(modelPath, "utf-8"));
    } catch (err) {
      throw new CodetokDataError(`${modelPath}: not a model file (${err})`);
    }
    if (doc.format_version !== 1) {
      throw new CodetokDataError(
        `${modelPath}: unsupported format_version ${doc.format_version}`,
      );
    }
    // One roundtrip through the CLI validates the checksum and payload.
    await runCli(python, ["encode", "--model", modelPath, "--in", "-", "--out", "-"], "");
    return new BoundTokenizer(
      modelPath,
      doc.checksum ?? "",
      doc.vocab_size ?? 0,
      doc.algorithm ?? "",
      doc.level ?? 0,
      python,
    );
  }

  /** Encode one normalized corpus line into token IDs. */
  async encode(text: string): Promise<number[]> {
    const [ids] = await this.encodeBatch([text]);
    return ids;
  }

  /** Encode many corpus lines in a single CLI invocation. */
  async encodeBatch(texts: string[]): Promise<number[][]> {
    if (texts.length === 0) {
      return [];
    }
    for (const t of texts) {
      if (t.includes("\n")) {
        throw new CodetokUsageError("corpus lines must not contain newlines");
      }
    }
    const out = await runCli(
      this.python,
      ["encode", "--model", this.modelPath, "--in", "-", "--out", "-"],
      texts.join("\n") + "\n",
    );
    const lines = out.split("\n");
    return texts.map((_, k) =>
      lines[k] === "" ? [] : lines[k].split(" ").map(Number),
    );
  }

  /** Decode token IDs back into the normalized corpus line. */
  async decode(ids: number[]): Promise<string> {
    const [line] = await this.decodeBatch([ids]);
    return line;
  }

  async decodeBatch(batches: number[][]): Promise<string[]> {
    if (batches.length === 0) {
      return [];
    }
    const out = await runCli(
      this.python,
      ["decode", "--model", this.modelPath, "--in", "-", "--out", "-"],
      batches.map((ids) => ids.join(" ")).join("\n") + "\n",
    );
    return out.split("\n").slice(0, batches.length);
  }
}

/** Train a model on a corpus file and load the result. */
export async function train(
  corpusPath: string,
  modelPath: string,
  opts: TrainOptions,
): Promise<BoundTokenizer> {
  const args = [
    "train",
    "--algo", opts.algorithm,
    "--level", String(opts.level),
    "--vocab", String(opts.vocabSize),
    "--in", corpusPath,
    "--out", modelPath,
  ];
  if (opts.coverage !== undefined) {
    args.push("--coverage", String(opts.coverage));
  }
  if (opts.seed !== undefined) {
    args.push("--seed", String(opts.seed));
  }
  if (opts.seedMultiplier !== undefined) {
    args.push("--seed-multiplier", String(opts.seedMultiplier));
  }
  await runCli(pythonOf(opts), args, "");
  return BoundTokenizer.load(modelPath, opts);
}

/** Average-length report of several models against a baseline. */
export async function lengthStats(
  baselineModel: string,
  otherModels: string[],
  corpusPath: string,
  opts?: RunnerOptions,
): Promise<LengthStats> {
  const out = await runCli(
    pythonOf(opts),
    [
      "stats",
      "--baseline", baselineModel,
      "--models", ...otherModels,
      "--in", corpusPath,
    ],
    "",
  );
  const doc = JSON.parse(out.trim().split("\n").at(-1) ?? "{}");
  return {
    baseline: doc.baseline,
    n_sequences: doc.n_sequences,
    entries: doc.entries,
  };
}
