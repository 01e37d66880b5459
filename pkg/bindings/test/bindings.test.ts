import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { beforeAll, describe, expect, it } from "vitest";

import {
  BoundTokenizer,
  CodetokDataError,
  lengthStats,
  train,
} from "../src/index.js";

const PYTHON = process.env.CODETOK_PYTHON ?? "python3";

// Deterministic fuzz corpus lines (words, punctuation, structure atoms).
const WORDS = [
  "x", "i", "value", "range", "print", "getData", "snake_case",
  "HTTPClient", "total", "df", "foo", "a1",
];
const PUNCT = ["(", ")", "[", "]", ".", ":", ",", "=", "+", ";"];
const SPECIAL = ["NEW_LINE", "INDENT", "DEDENT"];
const POOL = [...WORDS, ...PUNCT, ...SPECIAL];

function lcg(seed: number): () => number {
  let s = seed >>> 0;
  return () => {
    s = (s * 1664525 + 1013904223) >>> 0;
    return s / 2 ** 32;
  };
}

function fuzzLines(n: number, seed: number): string[] {
  const rnd = lcg(seed);
  const lines: string[] = [];
  for (let k = 0; k < n; k++) {
    const len = 1 + Math.floor(rnd() * 10);
    const atoms: string[] = [];
    for (let j = 0; j < len; j++) {
      atoms.push(POOL[Math.floor(rnd() * POOL.length)]);
    }
    lines.push(atoms.join(" "));
  }
  return lines;
}

let dir: string;
let modelPath: string;
let tok: BoundTokenizer;

beforeAll(async () => {
  dir = mkdtempSync(join(tmpdir(), "codetok-bindings-"));
  const corpusPath = join(dir, "corpus.txt");
  writeFileSync(corpusPath, fuzzLines(400, 1).join("\n") + "\n");
  modelPath = join(dir, "model.codetok.json");
  tok = await train(corpusPath, modelPath, {
    algorithm: "unigram",
    level: 1,
    vocabSize: 500,
    coverage: 1.0,
    seedMultiplier: 3,
  });
}, 120000);

describe("BoundTokenizer", () => {
  it("loads with model metadata", () => {
    expect(tok.vocabSize).toBe(500);
    expect(tok.algorithm).toBe("unigram");
    expect(tok.level).toBe(1);
    expect(tok.checksum).toMatch(/^sha256:/);
  });

  it("encodes bit-identically to the CLI on 1000 fuzz sequences", async () => {
    const lines = fuzzLines(1000, 2);
    const viaBindings = await tok.encodeBatch(lines);

    // reference: the CLI invoked independently through files
    const inPath = join(dir, "parity_in.txt");
    const outPath = join(dir, "parity_out.txt");
    writeFileSync(inPath, lines.join("\n") + "\n");
    execFileSync(PYTHON, [
      "-m", "codetok", "encode",
      "--model", modelPath, "--in", inPath, "--out", outPath,
    ]);
    const viaCli = readFileSync(outPath, "utf-8")
      .trimEnd()
      .split("\n")
      .map((l) => (l === "" ? [] : l.split(" ").map(Number)));

    expect(viaBindings).toEqual(viaCli);
  }, 120000);

  it("decode inverts encode", async () => {
    const lines = fuzzLines(50, 3);
    const encoded = await tok.encodeBatch(lines);
    const decoded = await tok.decodeBatch(encoded);
    expect(decoded).toEqual(lines);
  }, 60000);

  it("single encode/decode agrees with the batch path", async () => {
    const line = "print ( value ) NEW_LINE";
    const ids = await tok.encode(line);
    expect(ids.length).toBeGreaterThan(0);
    expect(await tok.decode(ids)).toBe(line);
    expect([ids]).toEqual(await tok.encodeBatch([line]));
  }, 60000);

  it("handles the empty sequence", async () => {
    expect(await tok.encode("")).toEqual([]);
    expect(await tok.decode([])).toBe("");
  }, 60000);

  it("raises a data error for a corrupted model file", async () => {
    const corrupt = join(dir, "corrupt.codetok.json");
    const data = readFileSync(modelPath, "utf-8");
    writeFileSync(corrupt, data.slice(0, Math.floor(data.length / 2)));
    await expect(BoundTokenizer.load(corrupt)).rejects.toBeInstanceOf(
      CodetokDataError,
    );
  }, 60000);

  it("raises a data error for a tampered checksum", async () => {
    const doc = JSON.parse(readFileSync(modelPath, "utf-8"));
    doc.level = 4;
    const tampered = join(dir, "tampered.codetok.json");
    writeFileSync(tampered, JSON.stringify(doc));
    await expect(BoundTokenizer.load(tampered)).rejects.toThrow(/checksum/i);
  }, 60000);
});

describe("lengthStats", () => {
  it("reports averages against a baseline", async () => {
    const corpusPath = join(dir, "stats_corpus.txt");
    writeFileSync(corpusPath, fuzzLines(100, 4).join("\n") + "\n");
    const report = await lengthStats(modelPath, [modelPath], corpusPath);
    expect(report.entries).toHaveLength(2);
    expect(report.entries[0].delta_pct).toBe(0);
    expect(report.n_sequences).toBe(100);
  }, 60000);
});
