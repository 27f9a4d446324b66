import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import type { AddressInfo } from "node:net";
import type { Server } from "node:http";
import { buildApp } from "../src/server.js";
import { loadConfig, ConfigError } from "../src/config.js";
import { wordTokens } from "../src/models.js";

const cases: string[] = JSON.parse(
  readFileSync(new URL("./fixtures/cases.json", import.meta.url), "utf8"),
);
const reflexive: string[] = JSON.parse(
  readFileSync(new URL("./fixtures/reflexivity.json", import.meta.url), "utf8"),
);

let server: Server;
let base: string;

beforeAll(async () => {
  const app = buildApp(loadConfig({ maxBatch: 8 }));
  await new Promise<void>((resolve) => {
    server = app.listen(0, "127.0.0.1", resolve);
  });
  const addr = server.address() as AddressInfo;
  base = `http://127.0.0.1:${addr.port}`;
});

afterAll(async () => {
  await new Promise<void>((resolve, reject) => {
    server.close((err) => (err ? reject(err) : resolve()));
  });
});

async function post(path: string, body: unknown): Promise<{ status: number; json: any }> {
  const res = await fetch(base + path, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  return { status: res.status, json: await res.json() };
}

describe("fixture corpus", () => {
  it("has the agreed size", () => {
    expect(cases).toHaveLength(50);
    expect(reflexive).toHaveLength(20);
  });
});

describe("/ner structural invariants", () => {
  it.each(cases.map((text, i) => [i, text] as const))(
    "case %i: spans are in bounds and match the surface text",
    async (_i, text) => {
      const { status, json } = await post("/ner", { text });
      expect(status).toBe(200);
      expect(Array.isArray(json.entities)).toBe(true);
      for (const ent of json.entities) {
        expect(Number.isInteger(ent.start)).toBe(true);
        expect(Number.isInteger(ent.end)).toBe(true);
        expect(ent.start).toBeGreaterThanOrEqual(0);
        expect(ent.start).toBeLessThan(ent.end);
        expect(ent.end).toBeLessThanOrEqual(text.length);
        expect(text.slice(ent.start, ent.end)).toBe(ent.text);
        expect(typeof ent.label).toBe("string");
        expect(ent.label.length).toBeGreaterThan(0);
      }
      // spans arrive sorted and non-overlapping
      for (let k = 1; k < json.entities.length; k += 1) {
        expect(json.entities[k].start).toBeGreaterThanOrEqual(json.entities[k - 1].end);
      }
    },
  );

  it("finds both people in a two-entity sentence", async () => {
    const { json } = await post("/ner", { text: "Barack Obama visited Hawaii" });
    expect(json.entities.length).toBeGreaterThanOrEqual(2);
    const texts = json.entities.map((e: { text: string }) => e.text);
    expect(texts).toContain("Barack Obama");
    expect(texts).toContain("Hawaii");
  });

  it("merges adjacent capitalized words into one span", async () => {
    const { json } = await post("/ner", { text: "She saw New York City from afar." });
    const texts = json.entities.map((e: { text: string }) => e.text);
    expect(texts).toContain("New York City");
  });

  it("does not tag a bare sentence-initial article", async () => {
    const { json } = await post("/ner", { text: "The weather turned cold." });
    expect(json.entities).toHaveLength(0);
  });

  it("rejects a missing text field", async () => {
    const { status, json } = await post("/ner", { body: "nope" });
    expect(status).toBe(400);
    expect(json.error.code).toBe("bad_request");
  });
});

describe("/nli structural invariants", () => {
  it.each(cases.map((text, i) => [i, text] as const))(
    "case %i: probabilities form a simplex and the label is the argmax",
    async (i, text) => {
      const hypothesis = cases[(i + 1) % cases.length];
      const { status, json } = await post("/nli", { premise: text, hypothesis });
      expect(status).toBe(200);
      expect(["entailment", "neutral", "contradiction"]).toContain(json.label);
      expect(json.probs).toHaveLength(3);
      let total = 0;
      for (const p of json.probs) {
        expect(p).toBeGreaterThanOrEqual(0);
        expect(p).toBeLessThanOrEqual(1);
        total += p;
      }
      expect(Math.abs(total - 1)).toBeLessThan(1e-4);
      const order = ["entailment", "neutral", "contradiction"];
      const argmax = order[json.probs.indexOf(Math.max(...json.probs))];
      expect(json.label).toBe(argmax);
    },
  );

  it.each(reflexive.map((text, i) => [i, text] as const))(
    "reflexivity %i: a sentence entails itself verbatim",
    async (_i, text) => {
      const { json } = await post("/nli", { premise: text, hypothesis: text });
      expect(json.label).toBe("entailment");
    },
  );

  it("flags a negation mismatch as contradiction", async () => {
    const { json } = await post("/nli", {
      premise: "The bridge spans the river.",
      hypothesis: "The bridge does not span the river.",
    });
    expect(json.label).toBe("contradiction");
  });

  it("returns neutral for unrelated sentences", async () => {
    const { json } = await post("/nli", {
      premise: "Bees communicate through dance.",
      hypothesis: "Submarines patrol the arctic shelf.",
    });
    expect(json.label).toBe("neutral");
  });
});

describe("/embed structural invariants", () => {
  it("returns fixed-dimension unit vectors in request order", async () => {
    const texts = cases.slice(0, 8);
    const { status, json } = await post("/embed", { texts });
    expect(status).toBe(200);
    expect(json.vectors).toHaveLength(texts.length);
    for (const vec of json.vectors) {
      expect(vec).toHaveLength(json.vectors[0].length);
      const norm = Math.sqrt(vec.reduce((s: number, x: number) => s + x * x, 0));
      expect(Math.abs(norm - 1)).toBeLessThan(1e-9);
    }
  });

  it("is deterministic across calls within a process", async () => {
    for (const text of cases) {
      const a = await post("/embed", { texts: [text] });
      const b = await post("/embed", { texts: [text] });
      expect(a.json.vectors[0]).toHaveLength(b.json.vectors[0].length);
      for (let d = 0; d < a.json.vectors[0].length; d += 1) {
        expect(Math.abs(a.json.vectors[0][d] - b.json.vectors[0][d])).toBeLessThan(1e-6);
      }
    }
  });

  it("preserves order: batch equals element-wise singles", async () => {
    const texts = ["alpha", "beta", "gamma", "delta"];
    const batch = await post("/embed", { texts });
    for (let i = 0; i < texts.length; i += 1) {
      const single = await post("/embed", { texts: [texts[i]] });
      expect(batch.json.vectors[i]).toEqual(single.json.vectors[0]);
    }
  });

  it("embeds the empty string without error", async () => {
    const { status, json } = await post("/embed", { texts: [""] });
    expect(status).toBe(200);
    const norm = Math.sqrt(json.vectors[0].reduce((s: number, x: number) => s + x * x, 0));
    expect(Math.abs(norm - 1)).toBeLessThan(1e-9);
  });

  it("rejects a batch above the configured limit", async () => {
    const texts = Array.from({ length: 9 }, (_v, i) => `text ${i}`);
    const { status, json } = await post("/embed", { texts });
    expect(status).toBe(413);
    expect(json.error.code).toBe("batch_too_large");
  });
});

describe("/root structural invariants", () => {
  it.each(cases.map((text, i) => [i, text] as const))(
    "case %i: root index is in bounds whenever tokens exist",
    async (_i, text) => {
      const { status, json } = await post("/root", { text });
      if (wordTokens(text).length === 0) {
        expect(status).toBe(400);
        expect(json.error.code).toBe("empty_sentence");
        return;
      }
      expect(status).toBe(200);
      expect(Array.isArray(json.tokens)).toBe(true);
      expect(json.tokens.length).toBeGreaterThan(0);
      expect(Number.isInteger(json.root_index)).toBe(true);
      expect(json.root_index).toBeGreaterThanOrEqual(0);
      expect(json.root_index).toBeLessThan(json.tokens.length);
    },
  );

  it("prefers a verb-like token over the midpoint", async () => {
    const { json } = await post("/root", { text: "Marie Curie discovered polonium in Paris" });
    expect(json.tokens[json.root_index]).toBe("discovered");
  });

  it("rejects an empty sentence", async () => {
    const { status, json } = await post("/root", { text: "   " });
    expect(status).toBe(400);
    expect(json.error.code).toBe("empty_sentence");
  });
});

describe("/health", () => {
  it("reports model identities and a version", async () => {
    const res = await fetch(base + "/health");
    expect(res.status).toBe(200);
    const json = await res.json();
    expect(typeof json.version).toBe("string");
    for (const key of ["ner", "nli", "embedder", "parser"]) {
      expect(typeof json.models[key]).toBe("string");
      expect(json.models[key].length).toBeGreaterThan(0);
    }
  });
});

describe("configuration validation", () => {
  it("rejects a zero batch limit", () => {
    expect(() => loadConfig({ maxBatch: 0 })).toThrow(ConfigError);
  });

  it("rejects a non-integer port", () => {
    expect(() => loadConfig({ port: 80.5 })).toThrow(ConfigError);
  });

  it("carries a machine-readable reason", () => {
    try {
      loadConfig({ maxBatch: -3 });
      expect.unreachable("config should not validate");
    } catch (err) {
      expect(err).toBeInstanceOf(ConfigError);
      const reason = (err as ConfigError).reason as { error: string; issues: unknown[] };
      expect(reason.error).toBe("invalid_config");
      expect(reason.issues.length).toBeGreaterThan(0);
    }
  });

  it("applies defaults when nothing is overridden", () => {
    const config = loadConfig();
    expect(config.maxBatch).toBeGreaterThanOrEqual(1);
    expect(config.host.length).toBeGreaterThan(0);
  });
});

describe("error handling", () => {
  it("answers unknown endpoints with a structured 404", async () => {
    const { status, json } = await post("/tokenize", { text: "x" });
    expect(status).toBe(404);
    expect(json.error.code).toBe("not_found");
  });

  it("answers malformed JSON with a structured 400", async () => {
    const res = await fetch(base + "/ner", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: "{not json",
    });
    expect(res.status).toBe(400);
    const json = await res.json();
    expect(json.error.code).toBe("bad_json");
  });
});
