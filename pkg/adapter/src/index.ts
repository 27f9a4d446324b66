import { configFromArgs, ConfigError } from "./config.js";
import { buildApp } from "./server.js";

function main(): void {
  let config;
  try {
    config = configFromArgs(process.argv.slice(2), process.env);
  } catch (err) {
    if (err instanceof ConfigError) {
      process.stderr.write(JSON.stringify(err.reason) + "\n");
      process.exit(1);
    }
    throw err;
  }
  const app = buildApp(config);
  const server = app.listen(config.port, config.host, () => {
    const addr = server.address();
    const where = typeof addr === "object" && addr !== null ? `${addr.address}:${addr.port}` : String(addr);
    process.stdout.write(`listening on ${where}\n`);
  });
  server.on("error", (err) => {
    process.stderr.write(
      JSON.stringify({ error: "listen_failed", message: err.message }) + "\n",
    );
    process.exit(1);
  });
}

main();
