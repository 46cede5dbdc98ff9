from dotenv import load_dotenv
from contextlib import asynccontextmanager
import os

load_dotenv()

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from core.config import configure_logging
from database.database import init_db
from routes import densities
from routes import experiments


@asynccontextmanager
async def lifespan(app: FastAPI):
    configure_logging()
    init_db()
    yield


app = FastAPI(title="urnwalk", lifespan=lifespan)


allowed_origins = os.getenv("ALLOWED_ORIGINS", "*")
if allowed_origins != "*":
    allowed_origins = [origin.strip() for origin in allowed_origins.split(",")]

app.add_middleware(
    CORSMiddleware,
    allow_origins=allowed_origins if allowed_origins != "*" else ["*"],
    allow_credentials=True,
    allow_methods=["GET"],
    allow_headers=["*"],
)


# Routes
app.include_router(densities.router)
app.include_router(experiments.router)


@app.get("/health")
def health():
    return {"status": "ok"}
