import { z } from "zod";

/**
 * Service configuration. Model names are identities reported by /health
 * so downstream reports can record exactly what annotated them.
 */
export const AdapterConfigSchema = z.object({
  nerModel: z.string().min(1).default("capitalized-run-matcher/1"),
  nliModel: z.string().min(1).default("lexical-overlap-nli/1"),
  embedderModel: z.string().min(1).default("char-trigram-hash-64/1"),
  parserModel: z.string().min(1).default("suffix-heuristic-root/1"),
  host: z.string().min(1).default("127.0.0.1"),
  port: z.number().int().min(0).max(65535).default(8753),
  maxBatch: z.number().int().min(1).default(256),
});

export type AdapterConfig = z.infer<typeof AdapterConfigSchema>;

export class ConfigError extends Error {
  readonly reason: object;
  constructor(reason: object) {
    super(JSON.stringify(reason));
    this.name = "ConfigError";
    this.reason = reason;
  }
}

/** Parse a partial config, applying defaults; throws ConfigError with a
 * machine-readable reason on invalid input. */
export function loadConfig(overrides: Record<string, unknown> = {}): AdapterConfig {
  const parsed = AdapterConfigSchema.safeParse(overrides);
  if (!parsed.success) {
    throw new ConfigError({
      error: "invalid_config",
      issues: parsed.error.issues.map((i) => ({
        path: i.path.join("."),
        message: i.message,
      })),
    });
  }
  return parsed.data;
}

/** Pick up overrides from command-line flags (--port 8080 --host 0.0.0.0
 * --max-batch 64) and environment variables. */
export function configFromArgs(argv: string[], env: NodeJS.ProcessEnv): AdapterConfig {
  const overrides: Record<string, unknown> = {};
  if (env.ADAPTER_HOST) overrides.host = env.ADAPTER_HOST;
  if (env.ADAPTER_PORT) overrides.port = Number(env.ADAPTER_PORT);
  if (env.ADAPTER_MAX_BATCH) overrides.maxBatch = Number(env.ADAPTER_MAX_BATCH);
  for (let i = 0; i < argv.length; i += 1) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (flag === "--host" && value !== undefined) {
      overrides.host = value;
      i += 1;
    } else if (flag === "--port" && value !== undefined) {
      overrides.port = Number(value);
      i += 1;
    } else if (flag === "--max-batch" && value !== undefined) {
      overrides.maxBatch = Number(value);
      i += 1;
    } else {
      throw new ConfigError({ error: "unknown_flag", flag });
    }
  }
  return loadConfig(overrides);
}
