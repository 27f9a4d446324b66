import express, { type Express, type Request, type Response, type NextFunction } from "express";
import { z } from "zod";
import type { AdapterConfig } from "./config.js";
import { classifyNli, embedText, findRoot, recognizeEntities } from "./models.js";

export const VERSION = "0.1.0";

const NerRequest = z.object({ text: z.string() });
const NliRequest = z.object({ premise: z.string(), hypothesis: z.string() });
const EmbedRequest = z.object({ texts: z.array(z.string()) });
const RootRequest = z.object({ text: z.string() });

class HttpError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

function parseBody<T>(schema: z.ZodType<T>, req: Request): T {
  const result = schema.safeParse(req.body);
  if (!result.success) {
    const first = result.error.issues[0];
    throw new HttpError(400, "bad_request", `${first.path.join(".") || "body"}: ${first.message}`);
  }
  return result.data;
}

/** Build the annotation service. Stateless: every response is a pure
 * function of the request body, so instances can be load-balanced freely. */
export function buildApp(config: AdapterConfig): Express {
  const app = express();
  app.use(express.json({ limit: "2mb" }));

  app.post("/ner", (req, res) => {
    const { text } = parseBody(NerRequest, req);
    const entities = recognizeEntities(text).map((s) => ({
      start: s.start,
      end: s.end,
      label: s.label,
      text: s.text,
    }));
    res.json({ entities });
  });

  app.post("/nli", (req, res) => {
    const { premise, hypothesis } = parseBody(NliRequest, req);
    const { label, probs } = classifyNli(premise, hypothesis);
    res.json({ label, probs });
  });

  app.post("/embed", (req, res) => {
    const { texts } = parseBody(EmbedRequest, req);
    if (texts.length > config.maxBatch) {
      throw new HttpError(
        413,
        "batch_too_large",
        `batch of ${texts.length} exceeds limit ${config.maxBatch}`,
      );
    }
    res.json({ vectors: texts.map(embedText) });
  });

  app.post("/root", (req, res) => {
    const { text } = parseBody(RootRequest, req);
    const result = findRoot(text);
    if (result === null) {
      throw new HttpError(400, "empty_sentence", "no word tokens in text");
    }
    res.json({ root_index: result.rootIndex, tokens: result.tokens });
  });

  app.get("/health", (_req, res) => {
    res.json({
      models: {
        ner: config.nerModel,
        nli: config.nliModel,
        embedder: config.embedderModel,
        parser: config.parserModel,
      },
      version: VERSION,
    });
  });

  app.use((_req, res) => {
    res.status(404).json({ error: { code: "not_found", message: "unknown endpoint" } });
  });

  app.use((err: unknown, _req: Request, res: Response, _next: NextFunction) => {
    if (err instanceof HttpError) {
      res.status(err.status).json({ error: { code: err.code, message: err.message } });
      return;
    }
    if (err instanceof SyntaxError) {
      res.status(400).json({ error: { code: "bad_json", message: "request body is not valid JSON" } });
      return;
    }
    res.status(500).json({ error: { code: "internal", message: "unexpected failure" } });
  });

  return app;
}
